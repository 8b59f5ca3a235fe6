use std::sync::Arc;

use crate::dimensions::LdimSolver;
use crate::error::{LabError, Result};
use crate::hypothesis::{Bit, FiniteClass, Point, Sample};
use crate::learners::{Learner, Meter, OutOfFuel};

/// The standard optimal algorithm: predict the label whose restriction of the
/// current version space has the larger Littlestone dimension.
///
/// An empty version space (unrealizable history) predicts 0, and so do ties.
/// Points outside the class's domain are outside the learner's definition
/// and it diverges on them.
pub struct SoaLearner {
    solver: LdimSolver,
    name: String,
}

pub fn soa(h: &FiniteClass) -> Result<SoaLearner> {
    SoaLearner::new(Arc::new(h.clone()))
}

impl SoaLearner {
    pub fn new(class: Arc<FiniteClass>) -> Result<Self> {
        if class.is_empty() {
            return Err(LabError::Precondition("SOA needs a nonempty class".into()));
        }
        Ok(SoaLearner {
            solver: LdimSolver::new(class),
            name: "soa".into(),
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn class(&self) -> &FiniteClass {
        self.solver.class()
    }

    pub fn solver(&self) -> &LdimSolver {
        &self.solver
    }

    /// Dimensions of the two restrictions of the version space at `x`,
    /// or `None` when the version space is empty.
    pub(crate) fn split_dims(
        &self,
        sample: &Sample,
        x: Point,
        meter: &mut Meter,
    ) -> Result<Option<(i32, i32)>, OutOfFuel> {
        let class = self.solver.class();
        let n = class.domain_size();
        if x >= n || sample.iter().any(|&(p, _)| p >= n) {
            return Err(meter.exhaust());
        }
        meter.charge(class.len() as u64)?;
        let v = class.version_space_unchecked(sample);
        if v.is_empty() {
            return Ok(None);
        }
        meter.charge(v.len() as u64)?;
        let zero = v.and(class.column(x, false));
        let one = v.and(class.column(x, true));
        Ok(Some((self.solver.ldim_of(&zero), self.solver.ldim_of(&one))))
    }
}

impl Learner for SoaLearner {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn predict(&self, sample: &Sample, x: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        Ok(match self.split_dims(sample, x, meter)? {
            None => false,
            Some((d0, d1)) => d1 > d0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{query, run_game, Prediction};

    fn smp(pairs: &[(Point, u8)]) -> Sample {
        Sample::from_pairs(pairs.iter().map(|&(x, y)| (x, y == 1)))
    }

    #[test]
    fn two_constants_trace() {
        let h = FiniteClass::from_strs(3, &["000", "111"]).unwrap();
        let l = soa(&h).unwrap();
        // both restrictions at x=1 are singletons: tie, predict 0
        assert_eq!(query(&l, &Sample::new(), 1, 100).prediction, Prediction::Bit(false));
        for x in 0..3 {
            assert_eq!(query(&l, &smp(&[(1, 1)]), x, 100).prediction, Prediction::Bit(true));
        }
    }

    #[test]
    fn singleton_never_errs() {
        let h = FiniteClass::from_strs(4, &["0110"]).unwrap();
        let l = soa(&h).unwrap();
        let s = smp(&[(3, 0), (1, 1), (0, 0), (2, 1)]);
        assert_eq!(run_game(&l, &s, 100).mistakes, 0);
    }

    #[test]
    fn unrealizable_history_predicts_zero() {
        let h = FiniteClass::from_strs(2, &["11"]).unwrap();
        let l = soa(&h).unwrap();
        assert_eq!(query(&l, &smp(&[(0, 0)]), 1, 100).prediction, Prediction::Bit(false));
    }

    #[test]
    fn out_of_domain_diverges() {
        let h = FiniteClass::from_strs(2, &["11"]).unwrap();
        let l = soa(&h).unwrap();
        assert!(matches!(query(&l, &Sample::new(), 2, 100).prediction, Prediction::Diverged { .. }));
    }

    #[test]
    fn budget_monotone() {
        let h = FiniteClass::all_functions(3).unwrap();
        let l = soa(&h).unwrap();
        let s = smp(&[(0, 1), (2, 0)]);
        let needed = query(&l, &s, 1, 10_000).steps;
        assert!(matches!(query(&l, &s, 1, needed - 1).prediction, Prediction::Diverged { .. }));
        let answer = query(&l, &s, 1, needed).prediction;
        assert_eq!(query(&l, &s, 1, 2 * needed).prediction, answer);
        assert!(soa(&FiniteClass::empty(2).unwrap()).is_err());
    }
}
