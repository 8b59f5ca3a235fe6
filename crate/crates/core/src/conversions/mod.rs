//! Conversions between leaf oracles and threshold oracles, dimension bounds,
//! and the splitting of a leaf oracle at a point.

mod bounds;
mod induced;
mod split;
mod thresholds;

use std::sync::Arc;

use serde::Serialize;

pub use bounds::{dim_bound, exponential_bound, BoundKind, DimensionBound};
pub use induced::{InducedFiniteClass, MAX_SUB_DOMAIN};
pub(crate) use induced::leaf_oracle_samples;
pub use split::{split_oracle, split_oracle_with, SplitOracle, SplitSummary};
pub use thresholds::{
    leaf_to_threshold_oracle, threshold_to_leaf_oracle, ConversionStats, LeafToThreshold, ThresholdToLeaf,
};

use crate::dimensions::{audit_leaf, audit_threshold, LeafOracle, LittlestoneTree, ThresholdOracle};
use crate::error::{OracleFault, Result};
use crate::hypothesis::{FiniteClass, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LeafToThreshold,
    ThresholdToLeaf,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CallInput {
    Sequence(Vec<Point>),
    Tree(LittlestoneTree),
}

/// One query to a constructed oracle and its verification against the class.
#[derive(Clone, Debug, Serialize)]
pub struct ConversionCall {
    pub input: CallInput,
    pub answer: Option<String>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<OracleFault>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConversionReport {
    pub direction: Direction,
    /// Depth of the source leaf oracle or arity of the source threshold oracle.
    pub source: usize,
    pub bound: DimensionBound,
    /// The bound actually used, when capped by the domain size.
    pub bound_used: usize,
    pub calls: Vec<ConversionCall>,
    pub stats: ConversionStats,
    pub all_verified: bool,
}

impl ConversionReport {
    pub fn first_fault(&self) -> Option<&OracleFault> {
        self.calls.iter().find_map(|c| c.fault.as_ref())
    }
}

fn record<T: ToString>(
    input: CallInput,
    answer: std::result::Result<T, OracleFault>,
    audit: impl FnOnce(&T) -> std::result::Result<(), OracleFault>,
) -> ConversionCall {
    let (answer, fault) = match answer {
        Ok(a) => {
            let fault = audit(&a).err();
            (Some(a.to_string()), fault)
        }
        Err(f) => (None, Some(f)),
    };
    ConversionCall {
        input,
        answer,
        verified: fault.is_none(),
        fault,
    }
}

/// Builds the threshold oracle of arity `bound.value + 1` from `source`, runs
/// it on `sequences`, and checks every answer against `truth`. Faults are
/// recorded per call; the source's own leaves are audited against `truth`.
pub fn verify_leaf_to_threshold(
    truth: &FiniteClass,
    source: Arc<dyn LeafOracle>,
    bound: DimensionBound,
    sequences: &[Vec<Point>],
) -> Result<ConversionReport> {
    let depth = source.depth();
    let w = leaf_to_threshold_oracle(source, truth.domain_size(), bound.value)?.with_audit(truth);
    let calls: Vec<ConversionCall> = sequences
        .iter()
        .map(|seq| record(CallInput::Sequence(seq.clone()), w.answer(seq), |&i| audit_threshold(truth, seq, i)))
        .collect();
    Ok(ConversionReport {
        direction: Direction::LeafToThreshold,
        source: depth,
        bound,
        bound_used: bound.value,
        all_verified: calls.iter().all(|c| c.verified),
        calls,
        stats: w.stats(),
    })
}

/// Builds the leaf oracle of depth `min(bound.value, domain_size) + 1` from
/// `source` and checks its answers on `trees` against `truth`.
///
/// Capping by the domain size is sound: the induced class lives on at most
/// `domain_size` points, so its dimension never exceeds that.
pub fn verify_threshold_to_leaf(
    truth: &FiniteClass,
    source: Arc<dyn ThresholdOracle>,
    bound: DimensionBound,
    trees: &[LittlestoneTree],
) -> Result<ConversionReport> {
    let arity = source.arity();
    let d_bound = bound.value.min(truth.domain_size());
    let a = threshold_to_leaf_oracle(source, truth.domain_size(), d_bound)?.with_audit(truth);
    let calls: Vec<ConversionCall> = trees
        .iter()
        .map(|t| record(CallInput::Tree(t.clone()), a.answer(t), |leaf| audit_leaf(truth, t, leaf)))
        .collect();
    Ok(ConversionReport {
        direction: Direction::ThresholdToLeaf,
        source: arity,
        bound,
        bound_used: d_bound,
        all_verified: calls.iter().all(|c| c.verified),
        calls,
        stats: a.stats(),
    })
}
