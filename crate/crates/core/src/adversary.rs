//! Adversaries: forcing mistakes along a fixed function, walking a shattered
//! tree against a learner, and extracting a non-realizable leaf from a
//! learner that claims a mistake bound.

use std::sync::Arc;

use serde::Serialize;

use crate::dimensions::{LdimSolver, LeafAddress, LittlestoneTree};
use crate::error::Result;
use crate::hypothesis::{Bit, FiniteClass, Hypothesis, Point, Sample};
use crate::learners::{query, run_game, GameTranscript, Learner, Prediction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingTarget {
    Function(Hypothesis),
    TreePath {
        tree: Option<LittlestoneTree>,
        leaf: LeafAddress,
    },
}

/// Where a learner failed to answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceWitness {
    pub history: Sample,
    pub point: Point,
    pub steps_spent: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForcingResult {
    pub sample: Sample,
    pub mistakes_forced: usize,
    pub target: ForcingTarget,
    /// The replay of `sample` through the learner.
    pub transcript: GameTranscript,
    /// The search ran out of disagreements before using all its iterations.
    pub stopped_early: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceWitness>,
}

/// `{"sample", "mistakes", "rounds", "realizable", "realized_by"}`.
#[derive(Clone, Debug, Serialize)]
pub struct ForcingReport {
    pub learner: String,
    pub sample: Sample,
    pub mistakes: usize,
    pub rounds: GameTranscript,
    pub target: ForcingTarget,
    pub stopped_early: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceWitness>,
    pub realizable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized_by: Option<Hypothesis>,
}

impl ForcingResult {
    pub fn report(&self, h: &FiniteClass) -> Result<ForcingReport> {
        let realizer = h.realizer(&self.sample)?.cloned();
        Ok(ForcingReport {
            learner: self.transcript.learner.clone(),
            sample: self.sample.clone(),
            mistakes: self.mistakes_forced,
            rounds: self.transcript.clone(),
            target: self.target.clone(),
            stopped_early: self.stopped_early,
            divergence: self.divergence.clone(),
            realizable: realizer.is_some(),
            realized_by: realizer,
        })
    }
}

/// Repeatedly finds the smallest point not yet in the sample where the
/// learner's current hypothesis disagrees with `f` and appends `(x, f(x))`,
/// at most `k` times.
///
/// Stops early once the learner agrees with `f` off the sample, and on
/// divergence.
pub fn force_against_function<L: Learner + ?Sized>(l: &L, f: &Hypothesis, k: usize, budget: u64) -> ForcingResult {
    let mut sample = Sample::new();
    let mut stopped_early = false;
    let mut divergence = None;
    'outer: for _ in 0..k {
        for x in 0..f.len() {
            if sample.iter().any(|&(p, _)| p == x) {
                continue;
            }
            match query(l, &sample, x, budget).prediction {
                Prediction::Diverged { steps_spent } => {
                    divergence = Some(DivergenceWitness {
                        history: sample.clone(),
                        point: x,
                        steps_spent,
                    });
                    break 'outer;
                }
                Prediction::Bit(p) if p != f.get(x) => {
                    sample.push(x, f.get(x));
                    continue 'outer;
                }
                Prediction::Bit(_) => {}
            }
        }
        stopped_early = true;
        break;
    }
    let transcript = run_game(l, &sample, budget);
    ForcingResult {
        mistakes_forced: sample.len(),
        sample,
        target: ForcingTarget::Function(f.clone()),
        transcript,
        stopped_early,
        divergence,
    }
}

/// Builds a depth-`ldim(h)` tree with every leaf realizable by `h` and walks
/// it against the learner, always along the edge contradicting its
/// prediction. Every completed step is a mistake and the sample stays
/// realizable.
pub fn shattered_tree_adversary<L: Learner + ?Sized>(h: &FiniteClass, l: &L, budget: u64) -> ForcingResult {
    let solver = LdimSolver::new(Arc::new(h.clone()));
    let d = solver.ldim().max(0) as usize;
    let tree = solver.shattered_tree(&h.full_subset(), d);
    let (sample, leaf, divergence) = match &tree {
        Some(t) => walk(l, t, budget),
        None => (Sample::new(), LeafAddress::new(Vec::new()), None),
    };
    let transcript = run_game(l, &sample, budget);
    ForcingResult {
        mistakes_forced: sample.len(),
        sample,
        target: ForcingTarget::TreePath { tree, leaf },
        transcript,
        stopped_early: false,
        divergence,
    }
}

fn walk<L: Learner + ?Sized>(
    l: &L,
    t: &LittlestoneTree,
    budget: u64,
) -> (Sample, LeafAddress, Option<DivergenceWitness>) {
    let labels = t.labels();
    let mut node = 0usize;
    let mut sample = Sample::new();
    let mut bits: Vec<Bit> = Vec::with_capacity(t.depth());
    while node < labels.len() {
        let x = labels[node];
        match query(l, &sample, x, budget).prediction {
            Prediction::Bit(p) => {
                let b = !p;
                sample.push(x, b);
                bits.push(b);
                node = 2 * node + 1 + usize::from(b);
            }
            Prediction::Diverged { steps_spent } => {
                let w = DivergenceWitness {
                    history: sample.clone(),
                    point: x,
                    steps_spent,
                };
                return (sample, LeafAddress::new(bits), Some(w));
            }
        }
    }
    (sample, LeafAddress::new(bits), None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Extraction {
    /// The leaf reached by walking against the learner; its sample cost the
    /// learner one mistake per level.
    Leaf { leaf: LeafAddress, sample: Sample, mistakes: usize },
    /// The learner did not answer at this node: it is not total.
    Diverged {
        /// Edges from the root to the node where the learner diverged.
        path: LeafAddress,
        witness: DivergenceWitness,
    },
}

/// Walks `t` root to leaf against the learner, taking the edge opposite to
/// each prediction. If the learner makes at most `t.depth() - 1` mistakes on
/// the class, the leaf reached cannot be realizable.
pub fn extract_nonrealizable_leaf<L: Learner + ?Sized>(l: &L, t: &LittlestoneTree, budget: u64) -> Extraction {
    match walk(l, t, budget) {
        (sample, leaf, None) => Extraction::Leaf {
            mistakes: sample.len(),
            leaf,
            sample,
        },
        (_, path, Some(witness)) => Extraction::Diverged { path, witness },
    }
}
