use serde::Serialize;

use crate::bits::Subset;
use crate::hypothesis::{FiniteClass, Point, Sample};
use crate::learners::{query, Learner, Prediction};
use crate::par::{self, Exec};

/// Worst case of a learner over every realizable sample up to a length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorstCase {
    pub mistakes: usize,
    /// A realizable sample achieving `mistakes` (first in search order).
    pub witness: Sample,
    /// First history and query point on which the learner diverged, if any.
    pub divergence: Option<(Sample, Point)>,
    /// Number of learner queries made.
    pub queries: u64,
}

impl WorstCase {
    fn leaf() -> Self {
        WorstCase {
            mistakes: 0,
            witness: Sample::new(),
            divergence: None,
            queries: 0,
        }
    }

    fn absorb(&mut self, other: WorstCase) {
        self.queries += other.queries;
        if self.divergence.is_none() {
            self.divergence = other.divergence;
        }
        if other.mistakes > self.mistakes {
            self.mistakes = other.mistakes;
            self.witness = other.witness;
        }
    }
}

/// Plays the learner against every `h`-realizable sample of length at most
/// `max_len` (points may repeat) and reports the largest mistake count.
///
/// The search is a tree: each node is a realizable history, the learner is
/// queried once per (node, point), and both labels that keep the history
/// realizable are explored. A divergence ends that branch.
pub fn worst_case_mistakes<L: Learner + ?Sized>(
    l: &L,
    h: &FiniteClass,
    max_len: usize,
    budget: u64,
    exec: Exec,
) -> WorstCase {
    let n = h.domain_size();
    if max_len == 0 || h.is_empty() {
        return WorstCase::leaf();
    }
    let root = h.full_subset();
    let branches = par::map_range(exec, n, |x| {
        let mut history = Sample::new();
        step(l, h, &root, &mut history, x, max_len, budget)
    });
    let mut out = WorstCase::leaf();
    for b in branches {
        out.absorb(b);
    }
    out
}

fn search<L: Learner + ?Sized>(
    l: &L,
    h: &FiniteClass,
    v: &Subset,
    history: &mut Sample,
    left: usize,
    budget: u64,
) -> WorstCase {
    let mut out = WorstCase::leaf();
    out.witness = history.clone();
    if left == 0 {
        return out;
    }
    for x in 0..h.domain_size() {
        out.absorb(step(l, h, v, history, x, left, budget));
    }
    out
}

fn step<L: Learner + ?Sized>(
    l: &L,
    h: &FiniteClass,
    v: &Subset,
    history: &mut Sample,
    x: Point,
    left: usize,
    budget: u64,
) -> WorstCase {
    let mut out = WorstCase::leaf();
    out.witness = history.clone();
    out.queries = 1;
    let p = match query(l, history, x, budget).prediction {
        Prediction::Bit(p) => p,
        Prediction::Diverged { .. } => {
            out.divergence = Some((history.clone(), x));
            return out;
        }
    };
    for y in [false, true] {
        let next = v.and(h.column(x, y));
        if next.is_empty() {
            continue;
        }
        history.push(x, y);
        let mut sub = search(l, h, &next, history, left - 1, budget);
        history.pop();
        sub.mistakes += usize::from(p != y);
        out.absorb(sub);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{run_game, soa, ConstantLearner, LoopingLearner};

    #[test]
    fn all_functions_on_three_points() {
        let h = FiniteClass::all_functions(3).unwrap();
        let l = soa(&h).unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let w = worst_case_mistakes(&l, &h, 4, 10_000, exec);
            assert_eq!(w.mistakes, 3);
            assert_eq!(run_game(&l, &w.witness, 10_000).mistakes, 3);
        }
    }

    #[test]
    fn constant_learner_on_two_constants() {
        let h = FiniteClass::from_strs(2, &["00", "11"]).unwrap();
        let w = worst_case_mistakes(&ConstantLearner::new(false), &h, 3, 10, Exec::Sequential);
        assert_eq!(w.mistakes, 3);
        assert_eq!(w.witness.len(), 3);
    }

    #[test]
    fn divergence_is_reported() {
        let h = FiniteClass::from_strs(2, &["00"]).unwrap();
        let w = worst_case_mistakes(&LoopingLearner, &h, 2, 10, Exec::Sequential);
        assert_eq!(w.divergence, Some((Sample::new(), 0)));
    }

    #[test]
    fn query_count_matches_tree() {
        // singleton class, domain 2: each node has exactly 2 children
        let h = FiniteClass::from_strs(2, &["01"]).unwrap();
        let w = worst_case_mistakes(&ConstantLearner::new(false), &h, 3, 10, Exec::Sequential);
        assert_eq!(w.queries, 2 + 4 + 8);
    }
}
