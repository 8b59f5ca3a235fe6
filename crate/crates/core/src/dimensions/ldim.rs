use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::bits::Subset;
use crate::dimensions::tree::{tree_count, LittlestoneTree, TreeEnumerator};
use crate::dimensions::Budgeted;
use crate::error::{LabError, Result};
use crate::hypothesis::{FiniteClass, Point, Sample};
use crate::par::{self, Exec};

/// Littlestone dimension by the version-space recursion, memoized on the
/// subset of hypotheses still alive.
///
/// The memo is keyed by subsets of one root class, so a solver is built per
/// class and reused for all of its subclasses (SOA asks for many of them).
/// Concurrent callers may insert the same key twice; both writes carry the
/// same value.
pub struct LdimSolver {
    class: Arc<FiniteClass>,
    memo: Option<RwLock<HashMap<Subset, i32>>>,
}

impl LdimSolver {
    pub fn new(class: Arc<FiniteClass>) -> Self {
        LdimSolver {
            class,
            memo: Some(RwLock::new(HashMap::new())),
        }
    }

    /// Same answers, no caching. Exponentially slower on larger classes.
    pub fn without_memo(class: Arc<FiniteClass>) -> Self {
        LdimSolver { class, memo: None }
    }

    pub fn class(&self) -> &Arc<FiniteClass> {
        &self.class
    }

    pub fn ldim(&self) -> i32 {
        self.ldim_of(&self.class.full_subset())
    }

    /// `-1` for the empty subset, `0` for a singleton.
    pub fn ldim_of(&self, subset: &Subset) -> i32 {
        let n = subset.len();
        if n <= 1 {
            return n as i32 - 1;
        }
        if let Some(memo) = &self.memo {
            if let Some(&v) = memo.read().unwrap().get(subset) {
                return v;
            }
        }
        let v = self.compute(subset, n);
        if let Some(memo) = &self.memo {
            memo.write().unwrap().insert(subset.clone(), v);
        }
        v
    }

    fn compute(&self, subset: &Subset, n: usize) -> i32 {
        // ldim never exceeds log2 of the class size.
        let cap = floor_log2(n) as i32;
        let mut best = 0;
        for x in 0..self.class.domain_size() {
            let zero = subset.and(self.class.column(x, false));
            let n0 = zero.len();
            if n0 == 0 || n0 == n {
                continue;
            }
            let one = subset.and(self.class.column(x, true));
            let (small, large) = if n0 <= n - n0 { (zero, one) } else { (one, zero) };
            if (floor_log2(small.len()) as i32) < best {
                continue;
            }
            let a = self.ldim_of(&small);
            if a < best {
                continue;
            }
            let b = self.ldim_of(&large);
            best = best.max(1 + a.min(b));
            if best == cap {
                break;
            }
        }
        best
    }

    /// A depth-`depth` tree whose leaves are all realizable by `subset`,
    /// following the recursion: at every node take the first point whose two
    /// restrictions both keep dimension at least `depth - 1`.
    pub fn shattered_tree(&self, subset: &Subset, depth: usize) -> Option<LittlestoneTree> {
        if depth == 0 || self.ldim_of(subset) < depth as i32 {
            return None;
        }
        let x = (0..self.class.domain_size()).find(|&x| {
            let z = subset.and(self.class.column(x, false));
            let o = subset.and(self.class.column(x, true));
            self.ldim_of(&z) >= depth as i32 - 1 && self.ldim_of(&o) >= depth as i32 - 1
        })?;
        if depth == 1 {
            return LittlestoneTree::new(1, vec![x]).ok();
        }
        let zero = self.shattered_tree(&subset.and(self.class.column(x, false)), depth - 1)?;
        let one = self.shattered_tree(&subset.and(self.class.column(x, true)), depth - 1)?;
        LittlestoneTree::compose(x, &zero, &one).ok()
    }
}

fn floor_log2(n: usize) -> usize {
    debug_assert!(n > 0);
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// Littlestone dimension with `-1` for the empty class.
pub fn ldim(h: &FiniteClass) -> i32 {
    LdimSolver::new(Arc::new(h.clone())).ldim()
}

/// The dimension as "minimal d >= 0 such that every depth-(d+1) tree has a
/// non-realizable leaf": identical to [`ldim`] except that the empty class
/// gets 0.
pub fn ldim_clamped(h: &FiniteClass) -> usize {
    ldim(h).max(0) as usize
}

enum Partial {
    Leaf,
    Node(Point, Box<Partial>, Box<Partial>),
}

impl Partial {
    fn fill(&self, node: usize, labels: &mut [Point]) {
        if let Partial::Node(x, zero, one) = self {
            labels[node] = *x;
            zero.fill(2 * node + 1, labels);
            one.fill(2 * node + 2, labels);
        }
    }
}

/// Depth-first search for a tree all of whose leaves are realizable, working
/// on path samples only. Subtrees below an unrealizable node are pruned since
/// every leaf under it is unrealizable too.
fn realizable_subtree(h: &FiniteClass, path: &mut Sample, depth: usize) -> Option<Partial> {
    if !h.realizes_unchecked(path) {
        return None;
    }
    if depth == 0 {
        return Some(Partial::Leaf);
    }
    (0..h.domain_size()).find_map(|x| realizable_node(h, path, x, depth))
}

fn realizable_node(h: &FiniteClass, path: &mut Sample, x: Point, depth: usize) -> Option<Partial> {
    path.push(x, false);
    let zero = realizable_subtree(h, path, depth - 1);
    path.pop();
    let zero = zero?;
    path.push(x, true);
    let one = realizable_subtree(h, path, depth - 1);
    path.pop();
    Some(Partial::Node(x, Box::new(zero), Box::new(one?)))
}

/// A depth-`depth` tree over the class's domain with every leaf realizable,
/// if one exists.
pub fn realizable_tree(h: &FiniteClass, depth: usize, exec: Exec) -> Option<LittlestoneTree> {
    if depth == 0 || !h.realizes_unchecked(&Sample::new()) {
        return None;
    }
    let root = par::find_first(exec, h.domain_size(), |x| {
        realizable_node(h, &mut Sample::new(), x, depth)
    })?;
    let mut labels = vec![0; (1 << depth) - 1];
    root.fill(0, &mut labels);
    LittlestoneTree::new(depth, labels).ok()
}

/// The minimal `d <= max_d` such that every depth-`(d+1)` tree over the
/// domain has a non-realizable leaf.
pub fn ldim_by_trees(h: &FiniteClass, max_d: usize, exec: Exec) -> Budgeted<usize> {
    for d in 0..=max_d {
        if realizable_tree(h, d + 1, exec).is_none() {
            return Budgeted::Within(d);
        }
    }
    Budgeted::Exceeded
}

/// The same quantity by literally enumerating every tree of each depth.
/// Only usable on tiny domains; `cap` bounds the trees examined per depth.
pub fn ldim_by_enumeration(
    h: &FiniteClass,
    max_d: usize,
    cap: u128,
    exec: Exec,
) -> Result<Budgeted<usize>> {
    let alphabet: Vec<Point> = (0..h.domain_size()).collect();
    for d in 0..=max_d {
        let depth = d + 1;
        let count = tree_count(depth, alphabet.len()).unwrap_or(u128::MAX);
        if count > cap {
            return Err(LabError::ResourceGuard {
                what: format!("enumerating depth-{depth} trees"),
                needed: count,
                cap,
            });
        }
        let every_tree_has_bad_leaf = par::all(exec, count as usize, |i| {
            let t = TreeEnumerator::nth_tree(depth, &alphabet, i as u128);
            (0..t.leaf_count()).any(|leaf| {
                let bits: Vec<bool> = (0..depth).map(|l| leaf >> (depth - 1 - l) & 1 == 1).collect();
                !h.realizes_unchecked(&t.path_sample(&bits))
            })
        });
        if every_tree_has_bad_leaf {
            return Ok(Budgeted::Within(d));
        }
    }
    Ok(Budgeted::Exceeded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::realizable;

    fn class(n: usize, strs: &[&str]) -> FiniteClass {
        FiniteClass::from_strs(n, strs).unwrap()
    }

    #[test]
    fn ldim_examples() {
        assert_eq!(ldim(&class(3, &["010"])), 0);
        assert_eq!(ldim(&FiniteClass::all_functions(3).unwrap()), 3);
        assert_eq!(ldim(&class(3, &["000", "111"])), 1);
        assert_eq!(ldim(&FiniteClass::empty(2).unwrap()), -1);
        assert_eq!(ldim_clamped(&FiniteClass::empty(2).unwrap()), 0);
        // thresholds on 3 points
        assert_eq!(ldim(&class(3, &["111", "011", "001"])), 1);
    }

    #[test]
    fn ldim_by_trees_examples() {
        let exec = Exec::default();
        assert_eq!(ldim_by_trees(&class(3, &["000", "111"]), 3, exec), Budgeted::Within(1));
        assert_eq!(ldim_by_trees(&class(3, &["010"]), 1, exec), Budgeted::Within(0));
        let all2 = FiniteClass::all_functions(2).unwrap();
        assert_eq!(ldim_by_trees(&all2, 3, exec), Budgeted::Within(2));
        assert_eq!(ldim_by_trees(&all2, 1, exec), Budgeted::Exceeded);
        assert_eq!(ldim_by_trees(&FiniteClass::empty(2).unwrap(), 0, exec), Budgeted::Within(0));
    }

    #[test]
    fn pruned_search_matches_literal_enumeration() {
        // every class on two points, and a few on three
        for mask in 0u32..16 {
            let hs = (0..4u64)
                .filter(|m| mask >> m & 1 == 1)
                .map(|m| crate::hypothesis::Hypothesis::from_mask(2, m));
            let h = FiniteClass::new(2, hs).unwrap();
            for exec in [Exec::Sequential, Exec::Parallel] {
                assert_eq!(
                    ldim_by_enumeration(&h, 3, 1 << 20, exec).unwrap(),
                    ldim_by_trees(&h, 3, exec),
                    "class {h}"
                );
            }
        }
        for strs in [&["000", "111"][..], &["001", "010", "100"], &["000", "011", "101", "110"]] {
            let h = class(3, strs);
            assert_eq!(
                ldim_by_enumeration(&h, 2, 1 << 22, Exec::default()).unwrap(),
                ldim_by_trees(&h, 2, Exec::default())
            );
        }
    }

    #[test]
    fn enumeration_guard() {
        let h = FiniteClass::all_functions(3).unwrap();
        assert!(matches!(
            ldim_by_enumeration(&h, 5, 1000, Exec::Sequential),
            Err(LabError::ResourceGuard { .. })
        ));
    }

    #[test]
    fn memo_does_not_change_answers() {
        let h = Arc::new(class(4, &["0000", "0011", "0101", "1001", "1110", "0111"]));
        assert_eq!(LdimSolver::new(h.clone()).ldim(), LdimSolver::without_memo(h).ldim());
    }

    #[test]
    fn shattered_tree_leaves_are_realizable() {
        let h = FiniteClass::all_functions(3).unwrap();
        let solver = LdimSolver::new(Arc::new(h.clone()));
        let t = solver.shattered_tree(&h.full_subset(), 3).unwrap();
        assert_eq!(t.depth(), 3);
        for leaf in t.leaves() {
            assert!(realizable(&h, &t.leaf_sample(&leaf).unwrap()).unwrap());
        }
        assert!(solver.shattered_tree(&h.full_subset(), 4).is_none());
    }

    #[test]
    fn realizable_tree_witness() {
        let h = class(3, &["000", "111"]);
        let t = realizable_tree(&h, 1, Exec::Sequential).unwrap();
        assert_eq!(t.labels(), &[0]);
        assert!(realizable_tree(&h, 2, Exec::Sequential).is_none());
    }
}
