use crate::dimensions::ldim;
use crate::error::{LabError, Result};
use crate::hypothesis::{Bit, FiniteClass, Point, Sample};
use crate::learners::{Learner, Meter, OutOfFuel};

/// Total learner for classes of dimension at most 1.
///
/// Below dimension 2 a version space has dimension 0 exactly when it holds a
/// single function, so the learner only ever counts: it never needs the
/// general dimension recursion.
#[derive(Clone, Debug)]
pub struct Eldim1Learner {
    class: FiniteClass,
}

pub fn eldim1_learner(h: &FiniteClass) -> Result<Eldim1Learner> {
    if h.is_empty() {
        return Err(LabError::Precondition("the class is empty".into()));
    }
    let d = ldim(h);
    if d > 1 {
        return Err(LabError::Precondition(format!("the class has Littlestone dimension {d} > 1")));
    }
    Ok(Eldim1Learner { class: h.clone() })
}

impl Eldim1Learner {
    pub fn class(&self) -> &FiniteClass {
        &self.class
    }
}

impl Learner for Eldim1Learner {
    fn name(&self) -> String {
        "eldim1".into()
    }

    fn predict(&self, sample: &Sample, x: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        let n = self.class.domain_size();
        if x >= n || sample.iter().any(|&(p, _)| p >= n) {
            return Err(meter.exhaust());
        }
        meter.charge(self.class.len() as u64)?;
        let v = self.class.version_space_unchecked(sample);
        meter.charge(v.len() as u64)?;
        if let Some(i) = v.first().filter(|_| v.len() == 1) {
            return Ok(self.class.hypotheses()[i].get(x));
        }
        let sizes = [
            v.and(self.class.column(x, false)).len(),
            v.and(self.class.column(x, true)).len(),
        ];
        Ok(match sizes {
            [0, 0] => false,
            [0, _] => true,
            [_, 0] => false,
            // predict against the side holding a single function
            [1, _] => true,
            _ => false,
        })
    }
}
