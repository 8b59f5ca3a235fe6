use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::Result;
use crate::hypothesis::{Bit, FiniteClass, Point, Sample};
use crate::learners::{Learner, Meter, OutOfFuel, SoaLearner};

/// Always predicts the same label, for free.
#[derive(Clone, Copy, Debug)]
pub struct ConstantLearner(Bit);

impl ConstantLearner {
    pub fn new(b: Bit) -> Self {
        ConstantLearner(b)
    }
}

impl Learner for ConstantLearner {
    fn name(&self) -> String {
        format!("constant-{}", u8::from(self.0))
    }

    fn predict(&self, _: &Sample, _: Point, _: &mut Meter) -> Result<Bit, OutOfFuel> {
        Ok(self.0)
    }
}

/// Predicts the majority label of the history (ties give 0), one step per
/// history pair.
#[derive(Clone, Copy, Debug, Default)]
pub struct MajorityLearner;

impl Learner for MajorityLearner {
    fn name(&self) -> String {
        "majority".into()
    }

    fn predict(&self, sample: &Sample, _: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        meter.charge(sample.len() as u64)?;
        let ones = sample.iter().filter(|&&(_, b)| b).count();
        Ok(2 * ones > sample.len())
    }
}

/// Never halts.
#[derive(Clone, Copy, Debug, Default)]
pub struct LoopingLearner;

impl Learner for LoopingLearner {
    fn name(&self) -> String {
        "looping".into()
    }

    fn predict(&self, _: &Sample, _: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        loop {
            meter.charge(1)?;
        }
    }
}

/// A deterministic pseudo-random learner: the label is a hash of the seed,
/// the history and the query point.
#[derive(Clone, Copy, Debug)]
pub struct SeededLearner {
    seed: u64,
}

impl SeededLearner {
    pub fn new(seed: u64) -> Self {
        SeededLearner { seed }
    }
}

impl Learner for SeededLearner {
    fn name(&self) -> String {
        format!("seeded-{}", self.seed)
    }

    fn predict(&self, sample: &Sample, x: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        meter.charge(1)?;
        let mut hasher = DefaultHasher::new();
        self.seed.hash(&mut hasher);
        sample.hash(&mut hasher);
        x.hash(&mut hasher);
        Ok(hasher.finish() & 1 == 1)
    }
}

/// SOA with the decision rule flipped: predicts the label whose restriction
/// has the *smaller* dimension. A negative control for mistake-bound checks.
pub struct InvertedSoa {
    inner: SoaLearner,
}

impl InvertedSoa {
    pub fn new(h: &FiniteClass) -> Result<Self> {
        Ok(InvertedSoa {
            inner: SoaLearner::new(Arc::new(h.clone()))?,
        })
    }
}

impl Learner for InvertedSoa {
    fn name(&self) -> String {
        "inverted-soa".into()
    }

    fn predict(&self, sample: &Sample, x: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        Ok(match self.inner.split_dims(sample, x, meter)? {
            None => false,
            Some((d0, d1)) => d1 < d0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{query, Prediction};

    #[test]
    fn baselines_behave() {
        let s = Sample::from_pairs([(0, true), (1, true), (2, false)]);
        assert_eq!(query(&ConstantLearner::new(true), &s, 5, 0).prediction, Prediction::Bit(true));
        assert_eq!(query(&MajorityLearner, &s, 5, 3).prediction, Prediction::Bit(true));
        assert!(matches!(query(&MajorityLearner, &s, 5, 2).prediction, Prediction::Diverged { .. }));
        assert_eq!(query(&MajorityLearner, &Sample::new(), 5, 0).prediction, Prediction::Bit(false));
        assert_eq!(
            query(&LoopingLearner, &s, 0, 17).prediction,
            Prediction::Diverged { steps_spent: 17 }
        );
        let a = query(&SeededLearner::new(3), &s, 4, 1).prediction;
        assert_eq!(query(&SeededLearner::new(3), &s, 4, 10).prediction, a);
    }
}
