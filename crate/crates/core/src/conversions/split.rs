use std::sync::Arc;

use serde::Serialize;

use crate::config;
use crate::dimensions::{check_tree_shape, enumerate_trees, tree_count, LeafAddress, LeafOracle, LittlestoneTree, TreeEnumerator};
use crate::error::{FaultKind, LabError, OracleFault, Result};
use crate::hypothesis::{Bit, Point};
use crate::par::{self, Exec};

/// Summary of a split decision.
#[derive(Clone, Debug, Serialize)]
pub struct SplitSummary {
    pub point: Point,
    pub bit: Bit,
    /// Whether the `0`- and `1`-side oracles are total over the universe.
    pub total: [bool; 2],
    pub compositions: u128,
}

/// Reduced oracle for the restriction of the class to `f(x) = b`.
///
/// On a depth-`d` tree `T` it runs through the depth-`d` trees `T'` over the
/// universe in enumeration order, queries the source oracle on the tree with
/// root `x`, `T` on the `b`-edge and `T'` on the other, and answers the first
/// time the source points into `T`. The path through `T` then extends
/// `(x, b)` to a non-realizable sample.
pub struct SplitOracle {
    a: Arc<dyn LeafOracle>,
    point: Point,
    bit: Bit,
    universe: Vec<Point>,
    depth: usize,
}

/// Splits a depth-`(d+1)` leaf oracle at `x` into a bit `b` and a depth-`d`
/// oracle for the restriction to `f(x) = b`.
///
/// Totality of each candidate is decided by running the source on every
/// composed tree over the universe. If neither candidate is total the source
/// contradicts itself on one composed tree, returned as the fault witness.
pub fn split_oracle(a: Arc<dyn LeafOracle>, x: Point, universe: &[Point]) -> Result<(SplitOracle, SplitSummary)> {
    split_oracle_with(a, x, universe, config::enum_cap()?, Exec::default())
}

pub fn split_oracle_with(
    a: Arc<dyn LeafOracle>,
    x: Point,
    universe: &[Point],
    cap: u128,
    exec: Exec,
) -> Result<(SplitOracle, SplitSummary)> {
    let depth = a
        .depth()
        .checked_sub(1)
        .filter(|&d| d >= 1)
        .ok_or_else(|| LabError::Precondition(format!("splitting needs oracle depth >= 2, got {}", a.depth())))?;
    let mut universe = universe.to_vec();
    universe.sort_unstable();
    universe.dedup();
    if universe.binary_search(&x).is_err() {
        return Err(LabError::Precondition(format!("the universe must contain the split point {x}")));
    }
    let trees = config::guard("trees per split side", tree_count(depth, universe.len()), cap)?;
    let compositions = config::guard("composed trees for a split", trees.checked_mul(trees), cap)?;
    // Each candidate is checked with its own queries and nothing is cached,
    // so a source that answers differently across runs is caught below.
    let fail0 = first_failing_row(&*a, x, &universe, depth, trees as usize, false, exec)?;
    let fail1 = first_failing_row(&*a, x, &universe, depth, trees as usize, true, exec)?;
    let total = [fail0.is_none(), fail1.is_none()];
    let bit = match (fail0, fail1) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some((i, leaves0)), Some((j, leaves1))) => {
            // A_0 saw the source point into T_1 on (T_0 = i, T_1 = j), and
            // A_1 saw it point into T_0 on the same tree.
            let t0 = TreeEnumerator::nth_tree(depth, &universe, i as u128);
            let t1 = TreeEnumerator::nth_tree(depth, &universe, j as u128);
            let composed = LittlestoneTree::compose(x, &t0, &t1)?;
            return Err(OracleFault::new(
                FaultKind::ContractViolation,
                "neither side of the split is total: the oracle pointed into both subtrees of one tree",
            )
            .with_tree(&composed)
            .with_answer(format!("{} then {}", leaves0[j], leaves1[i]))
            .into());
        }
    };
    Ok((
        SplitOracle {
            a,
            point: x,
            bit,
            universe,
            depth,
        },
        SplitSummary {
            point: x,
            bit,
            total,
            compositions,
        },
    ))
}

/// The first tree `T_c` (by index) for which no `T_{1-c}` makes the source
/// point into `T_c`, with the source's answers along that row.
fn first_failing_row(
    a: &dyn LeafOracle,
    x: Point,
    universe: &[Point],
    depth: usize,
    trees: usize,
    c: Bit,
    exec: Exec,
) -> Result<Option<(usize, Vec<LeafAddress>)>> {
    let rows = par::try_map_range(exec, trees, |i| -> Result<Option<Vec<LeafAddress>>, OracleFault> {
        let mine = TreeEnumerator::nth_tree(depth, universe, i as u128);
        let mut seen = Vec::with_capacity(trees);
        for j in 0..trees {
            let other = TreeEnumerator::nth_tree(depth, universe, j as u128);
            let composed = if c {
                LittlestoneTree::compose(x, &other, &mine)
            } else {
                LittlestoneTree::compose(x, &mine, &other)
            }
            .expect("equal depths");
            let leaf = a.answer(&composed)?;
            if leaf_side(&composed, &leaf)? == c {
                return Ok(None);
            }
            seen.push(leaf);
        }
        Ok(Some(seen))
    })?;
    Ok(rows.into_iter().enumerate().find_map(|(i, r)| r.map(|leaves| (i, leaves))))
}

fn leaf_side(tree: &LittlestoneTree, leaf: &LeafAddress) -> Result<Bit, OracleFault> {
    match leaf.split_first() {
        Some((b, _)) if leaf.len() == tree.depth() => Ok(b),
        _ => Err(OracleFault::new(
            FaultKind::ShapeMismatch,
            format!("leaf {leaf} does not fit a depth-{} tree", tree.depth()),
        )
        .with_tree(tree)
        .with_answer(leaf)),
    }
}

impl SplitOracle {
    pub fn bit(&self) -> Bit {
        self.bit
    }

    pub fn point(&self) -> Point {
        self.point
    }

    pub fn universe(&self) -> &[Point] {
        &self.universe
    }
}

impl LeafOracle for SplitOracle {
    fn depth(&self) -> usize {
        self.depth
    }

    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault> {
        check_tree_shape(tree, self.depth, None)?;
        if let Some(&bad) = tree.labels().iter().find(|x| self.universe.binary_search(x).is_err()) {
            return Err(OracleFault::new(
                FaultKind::ShapeMismatch,
                format!("label {bad} is outside the split universe"),
            )
            .with_tree(tree));
        }
        for other in enumerate_trees(self.depth, &self.universe).expect("nonempty universe") {
            let composed = if self.bit {
                LittlestoneTree::compose(self.point, &other, tree)
            } else {
                LittlestoneTree::compose(self.point, tree, &other)
            }
            .expect("equal depths");
            let leaf = self.a.answer(&composed)?;
            if leaf_side(&composed, &leaf)? == self.bit {
                let (_, rest) = leaf.split_first().expect("nonempty leaf");
                return Ok(rest);
            }
        }
        Err(OracleFault::new(
            FaultKind::Inconsistent,
            "the source oracle never points into this subtree, although the split found it total",
        )
        .with_tree(tree))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimensions::{audit_leaf, brute_leaf_oracle, enumerate_trees, ldim, FnLeafOracle};
    use crate::hypothesis::{restrict, FiniteClass};
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn split_lowers_dimension() {
        let h = FiniteClass::from_strs(3, &["000", "111", "101"]).unwrap();
        let d = ldim(&h) as usize;
        assert_eq!(d, 1);
        let a: Arc<dyn LeafOracle> = Arc::new(brute_leaf_oracle(&h, d + 1));
        let (reduced, summary) = split_oracle(a, 0, &[0, 1, 2]).unwrap();
        let r = restrict(&h, 0, summary.bit).unwrap();
        assert!(ldim(&r) < d as i32);
        for tree in enumerate_trees(d, &[0, 1, 2]).unwrap() {
            let leaf = reduced.answer(&tree).unwrap();
            audit_leaf(&r, &tree, &leaf).unwrap();
        }
    }

    #[test]
    fn empty_restriction_takes_zero() {
        let h = FiniteClass::from_strs(2, &["10", "11"]).unwrap();
        let a: Arc<dyn LeafOracle> = Arc::new(brute_leaf_oracle(&h, 2));
        let (reduced, summary) = split_oracle(a, 0, &[0, 1]).unwrap();
        assert!(!summary.bit);
        assert!(summary.total[0]);
        let tree = LittlestoneTree::new(1, vec![1]).unwrap();
        assert!(reduced.answer(&tree).is_ok());
    }

    #[test]
    fn oracle_changing_its_answers() {
        // points into T_1 for its first four answers and into T_0 afterwards:
        // the 0-side check sees only T_1 answers, the 1-side check only T_0
        let calls = AtomicUsize::new(0);
        let liar = FnLeafOracle::new(2, move |_: &LittlestoneTree| {
            let side = calls.fetch_add(1, Ordering::SeqCst) < 4;
            Ok(LeafAddress::new(vec![side, false]))
        });
        let err = split_oracle_with(Arc::new(liar), 0, &[0, 1], 1 << 20, Exec::Sequential)
            .err()
            .unwrap();
        match err {
            LabError::Oracle(f) => {
                assert_eq!(f.kind, FaultKind::ContractViolation);
                assert!(f.witness.tree.is_some());
                assert_eq!(f.witness.answer.as_deref(), Some("10 then 00"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn preconditions() {
        let h = FiniteClass::from_strs(2, &["10"]).unwrap();
        assert!(split_oracle(Arc::new(brute_leaf_oracle(&h, 1)), 0, &[0, 1]).is_err());
        assert!(split_oracle(Arc::new(brute_leaf_oracle(&h, 2)), 3, &[0, 1]).is_err());
    }
}
