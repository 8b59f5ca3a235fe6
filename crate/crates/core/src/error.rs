use serde::Serialize;
use thiserror::Error;

use crate::dimensions::LittlestoneTree;
use crate::hypothesis::{Hypothesis, Point, Sample};

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("point {point} is outside the domain of size {domain_size}")]
    Domain { point: Point, domain_size: usize },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resource guard: {what} needs {needed}, cap is {cap}")]
    ResourceGuard { what: String, needed: u128, cap: u128 },

    #[error("{0}")]
    Oracle(Box<OracleFault>),
}

impl From<OracleFault> for LabError {
    fn from(fault: OracleFault) -> Self {
        LabError::Oracle(Box::new(fault))
    }
}

impl From<serde_json::Error> for LabError {
    fn from(err: serde_json::Error) -> Self {
        LabError::Parse(err.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    /// The oracle returned an answer that breaks its contract (a realizable leaf
    /// or threshold), or it had no admissible answer at all.
    ContractViolation,
    /// A conversion could not find its guaranteed answer; the supplied bound is too small.
    BoundFault,
    /// Two runs over the same input disagreed.
    Inconsistent,
    /// The oracle was handed an input of the wrong shape.
    ShapeMismatch,
}

/// Offending input and answer of a misbehaving oracle.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FaultWitness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<LittlestoneTree>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<Point>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<Sample>,
    /// A hypothesis realizing `sample`, when the fault is a realizable answer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized_by: Option<Hypothesis>,
}

#[derive(Debug, Clone, Error, Serialize)]
#[error("oracle fault ({kind:?}): {message}")]
pub struct OracleFault {
    pub kind: FaultKind,
    pub message: String,
    pub witness: FaultWitness,
}

impl OracleFault {
    pub fn new(kind: FaultKind, message: impl Into<String>) -> Self {
        OracleFault {
            kind,
            message: message.into(),
            witness: FaultWitness::default(),
        }
    }

    pub fn with_tree(mut self, tree: &LittlestoneTree) -> Self {
        self.witness.tree = Some(tree.clone());
        self
    }

    pub fn with_sequence(mut self, seq: &[Point]) -> Self {
        self.witness.sequence = Some(seq.to_vec());
        self
    }

    pub fn with_answer(mut self, answer: impl ToString) -> Self {
        self.witness.answer = Some(answer.to_string());
        self
    }

    pub fn with_sample(mut self, sample: &Sample) -> Self {
        self.witness.sample = Some(sample.clone());
        self
    }

    pub fn with_realizer(mut self, h: Option<Hypothesis>) -> Self {
        self.witness.realized_by = h;
        self
    }
}
