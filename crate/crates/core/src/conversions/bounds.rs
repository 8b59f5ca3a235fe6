use serde::Serialize;

use crate::dimensions::{ldim, tdim, tree_count, Budgeted, LittlestoneTree};
use crate::error::{LabError, Result};
use crate::hypothesis::{FiniteClass, Hypothesis, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Largest threshold dimension of a class with Littlestone dimension `arg`.
    TOfD,
    /// Largest Littlestone dimension of a class with threshold dimension `arg`.
    DOfT,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionBound {
    pub kind: BoundKind,
    pub arg: usize,
    pub value: usize,
    pub exact: bool,
}

/// `2^(arg+1) - 1`, the exponential bound valid in both directions.
pub fn exponential_bound(arg: usize) -> usize {
    1usize
        .checked_shl(arg as u32 + 1)
        .filter(|&v| v != 0)
        .map_or(usize::MAX, |v| v - 1)
}

/// Either the exponential bound or, for `arg <= 2`, the exact extremal value
/// found by search. An exact search that outgrows `cap` is `Exceeded`.
pub fn dim_bound(kind: BoundKind, arg: usize, exact: bool, cap: u128) -> Result<Budgeted<DimensionBound>> {
    if !exact {
        return Ok(Budgeted::Within(DimensionBound {
            kind,
            arg,
            value: exponential_bound(arg),
            exact: false,
        }));
    }
    if arg > 2 {
        return Err(LabError::Precondition(format!("exact bounds are searched only for arg <= 2, got {arg}")));
    }
    let value = match kind {
        BoundKind::TOfD => Some(exact_t_of_d(arg)?),
        BoundKind::DOfT => exact_d_of_t(arg, cap)?,
    };
    Ok(match value {
        Some(value) => Budgeted::Within(DimensionBound {
            kind,
            arg,
            value,
            exact: true,
        }),
        None => Budgeted::Exceeded,
    })
}

/// The threshold patterns on `t` points: function `i` is 0 before index `i`.
fn threshold_class(t: usize) -> Result<FiniteClass> {
    FiniteClass::new(
        t,
        (0..t).map(|i| Hypothesis::from_bits(&(0..t).map(|j| j >= i).collect::<Vec<_>>())),
    )
}

/// A class realizing all `t` thresholds on some sequence contains, restricted
/// to that sequence, the `t` threshold patterns; dimension only drops under
/// restriction and subclasses. So `t_d` is the largest `t` whose threshold
/// patterns have dimension at most `d`. The exponential bound caps the scan.
fn exact_t_of_d(d: usize) -> Result<usize> {
    let mut best = 0;
    for t in 1..=exponential_bound(d) + 1 {
        let h = threshold_class(t)?;
        debug_assert_eq!(tdim(&h, t).within().map(|w| w.tdim), Some(t));
        if ldim(&h) as usize <= d {
            best = t;
        } else {
            break;
        }
    }
    Ok(best)
}

/// A class of dimension at least `k` contains a subclass with one function per
/// leaf of some shattered depth-`k` tree, and threshold dimension only drops
/// under subclasses. So `d_t >= k` iff some such minimal class, restricted to
/// the tree's labels, has threshold dimension at most `t`. Values off a
/// function's own path are free and are all searched.
fn exact_d_of_t(t: usize, cap: u128) -> Result<Option<usize>> {
    let mut k = 0usize;
    loop {
        let next = k + 1;
        match minimal_class_with_tdim_le(next, t, cap)? {
            Search::Found => k = next,
            Search::NotFound => return Ok(Some(k)),
            Search::OverBudget => return Ok(None),
        }
    }
}

enum Search {
    Found,
    NotFound,
    OverBudget,
}

fn minimal_class_with_tdim_le(k: usize, t: usize, cap: u128) -> Result<Search> {
    let shapes = canonical_shapes(k);
    let mut budget = cap;
    for labels in &shapes {
        let m = labels.iter().copied().max().map_or(0, |v| v + 1);
        // each of the 2^k leaf functions has m - k free values
        let free = (m - k) << k;
        let count = match 1u128.checked_shl(free as u32) {
            Some(c) if free < 128 && c <= budget => c,
            _ => return Ok(Search::OverBudget),
        };
        budget -= count;
        let tree = LittlestoneTree::new(k, labels.clone())?;
        let paths: Vec<Vec<(Point, bool)>> = tree
            .leaves()
            .map(|leaf| tree.leaf_sample(&leaf).map(|s| s.pairs().to_vec()))
            .collect::<Result<_>>()?;
        for assignment in 0..count {
            let mut rest = assignment;
            let mut funcs = Vec::with_capacity(paths.len());
            for path in &paths {
                let mut bits = vec![None; m];
                for &(x, b) in path {
                    bits[x] = Some(b);
                }
                let bits: Vec<bool> = bits
                    .into_iter()
                    .map(|v| {
                        v.unwrap_or_else(|| {
                            let b = rest & 1 == 1;
                            rest >>= 1;
                            b
                        })
                    })
                    .collect();
                funcs.push(Hypothesis::from_bits(&bits));
            }
            let h = FiniteClass::new(m, funcs)?;
            if !tdim(&h, t).is_exceeded() {
                return Ok(Search::Found);
            }
        }
    }
    Ok(Search::NotFound)
}

/// Depth-`k` label layouts up to renaming, with labels distinct along every
/// path (a repeated label on a path cannot be shattered). Labels are
/// introduced in breadth-first order.
fn canonical_shapes(k: usize) -> Vec<Vec<Point>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let nodes = (1usize << k) - 1;
    if tree_count(k, nodes).is_none() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut labels = Vec::with_capacity(nodes);
    extend_shapes(nodes, &mut labels, 0, &mut out);
    out
}

fn extend_shapes(nodes: usize, labels: &mut Vec<Point>, fresh: Point, out: &mut Vec<Vec<Point>>) {
    let i = labels.len();
    if i == nodes {
        out.push(labels.clone());
        return;
    }
    for x in 0..=fresh {
        let mut anc = i;
        let mut clash = false;
        while anc > 0 {
            anc = (anc - 1) / 2;
            if labels[anc] == x {
                clash = true;
                break;
            }
        }
        if clash {
            continue;
        }
        labels.push(x);
        extend_shapes(nodes, labels, if x == fresh { fresh + 1 } else { fresh }, out);
        labels.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(kind: BoundKind, arg: usize) -> Budgeted<DimensionBound> {
        dim_bound(kind, arg, true, 1 << 20).unwrap()
    }

    #[test]
    fn exponential_values() {
        let b = dim_bound(BoundKind::TOfD, 2, false, 0).unwrap().within().unwrap();
        assert_eq!(b.value, 7);
        let b = dim_bound(BoundKind::DOfT, 1, false, 0).unwrap().within().unwrap();
        assert_eq!(b.value, 3);
        assert_eq!(exponential_bound(0), 1);
    }

    #[test]
    fn exact_t_of_d_values() {
        let vals: Vec<usize> = (0..=2)
            .map(|d| exact(BoundKind::TOfD, d).within().unwrap().value)
            .collect();
        assert_eq!(vals, vec![1, 3, 7]);
    }

    #[test]
    fn exact_t_of_d_zero_by_search() {
        // every singleton class on 3 points has tdim <= 1
        for m in 0..8u64 {
            let h = FiniteClass::new(3, [Hypothesis::from_mask(3, m)]).unwrap();
            assert!(tdim(&h, 3).within().unwrap().tdim <= 1);
        }
    }

    #[test]
    fn exact_d_of_t_small() {
        assert_eq!(exact(BoundKind::DOfT, 0).within().unwrap().value, 0);
        assert_eq!(exact(BoundKind::DOfT, 1).within().unwrap().value, 1);
        assert!(dim_bound(BoundKind::DOfT, 2, true, 1 << 12).unwrap().is_exceeded());
        assert!(dim_bound(BoundKind::DOfT, 3, true, 1 << 20).is_err());
    }

    #[test]
    fn shapes_up_to_renaming() {
        // depth 2: root a, children b,c with b == c allowed: 2 shapes
        assert_eq!(canonical_shapes(2), vec![vec![0, 1, 1], vec![0, 1, 2]]);
        assert_eq!(canonical_shapes(1), vec![vec![0]]);
    }
}
