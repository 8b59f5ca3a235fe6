use std::sync::Arc;

use serde::Serialize;

use crate::config;
use crate::conversions::{leaf_oracle_samples, InducedFiniteClass};
use crate::dimensions::LeafOracle;
use crate::error::{LabError, Result};
use crate::hypothesis::{FiniteClass, Point};
use crate::learners::SoaLearner;
use crate::par::Exec;

/// Learner for the regime where an upper bound `N` on every query point is
/// announced in advance. Holds a leaf oracle of depth `d + 1`; each `build`
/// turns it into an explicit class on `{0..N}` of dimension at most `d`.
pub struct BoundedRegimeLearner {
    oracle: Arc<dyn LeafOracle>,
    cap: u128,
    exec: Exec,
}

pub fn bounded_regime_learner(oracle: Arc<dyn LeafOracle>) -> Result<BoundedRegimeLearner> {
    Ok(BoundedRegimeLearner {
        oracle,
        cap: config::enum_cap()?,
        exec: Exec::default(),
    })
}

/// The product of one `build`: SOA over `H_N` plus bookkeeping.
pub struct BoundedBuild {
    pub bound: Point,
    pub class: FiniteClass,
    pub learner: SoaLearner,
    pub trees_enumerated: u128,
    /// Distinct self-consistent leaf samples the oracle pointed at.
    pub forbidden_patterns: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundedSummary {
    pub bound: Point,
    pub mistake_bound: usize,
    pub class_size: usize,
    pub trees_enumerated: u128,
    pub forbidden_patterns: usize,
}

impl BoundedBuild {
    pub fn summary(&self, mistake_bound: usize) -> BoundedSummary {
        BoundedSummary {
            bound: self.bound,
            mistake_bound,
            class_size: self.class.len(),
            trees_enumerated: self.trees_enumerated,
            forbidden_patterns: self.forbidden_patterns,
        }
    }
}

impl BoundedRegimeLearner {
    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// The mistake bound `d`; the oracle has depth `d + 1`.
    pub fn mistake_bound(&self) -> Option<usize> {
        self.oracle.depth().checked_sub(1)
    }

    pub fn build(&self, bound: Point) -> Result<BoundedBuild> {
        let depth = self.oracle.depth();
        if depth == 0 {
            return Err(LabError::Precondition("the leaf oracle must have depth at least 1".into()));
        }
        let points = bound
            .checked_add(1)
            .filter(|&p| p <= 20)
            .ok_or_else(|| LabError::ResourceGuard {
                what: "materializing every function on {0..N}".into(),
                needed: 1u128.checked_shl(bound as u32 + 1).unwrap_or(u128::MAX),
                cap: 1 << 20,
            })?;
        let alphabet: Vec<Point> = (0..points).collect();
        let (samples, count) = leaf_oracle_samples(&*self.oracle, &alphabet, self.cap, self.exec)?;
        let induced = InducedFiniteClass::new(&alphabet, samples)?;
        let class = induced.members().clone();
        if class.is_empty() {
            return Err(LabError::Precondition(
                "every function on {0..N} is excluded; the oracle's class has no function".into(),
            ));
        }
        let learner = SoaLearner::new(Arc::new(class.clone()))?.named(format!("bounded-soa-N{bound}"));
        Ok(BoundedBuild {
            bound,
            class,
            learner,
            trees_enumerated: count,
            forbidden_patterns: induced.forbidden_count(),
        })
    }
}
