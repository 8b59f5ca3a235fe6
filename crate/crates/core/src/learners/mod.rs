//! Step-budgeted learners and the online game.
//!
//! A learner is a partial prediction procedure. Partiality is modeled with a
//! fuel meter: every learner charges abstract steps while it works, and a
//! learner that runs out of fuel has diverged on that input. Learners are
//! deterministic and monotone in the budget: an answer given with `k` steps
//! of fuel is the answer given with any larger budget.

mod baseline;
mod bounded;
mod eldim1;
mod exhaustive;
mod soa;

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

pub use baseline::{ConstantLearner, InvertedSoa, LoopingLearner, MajorityLearner, SeededLearner};
pub use bounded::{bounded_regime_learner, BoundedBuild, BoundedRegimeLearner};
pub use eldim1::{eldim1_learner, Eldim1Learner};
pub use exhaustive::{worst_case_mistakes, WorstCase};
pub use soa::{soa, SoaLearner};

use crate::hypothesis::{Bit, Hypothesis, Point, Sample};

/// The learner ran out of fuel before answering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfFuel;

/// Fuel accounting for one prediction.
#[derive(Clone, Debug)]
pub struct Meter {
    limit: u64,
    spent: u64,
}

impl Meter {
    pub fn new(limit: u64) -> Self {
        Meter { limit, spent: 0 }
    }

    pub fn charge(&mut self, steps: u64) -> Result<(), OutOfFuel> {
        let total = self.spent.saturating_add(steps);
        if total > self.limit {
            self.spent = self.limit;
            return Err(OutOfFuel);
        }
        self.spent = total;
        Ok(())
    }

    /// Burns whatever is left; used to model non-halting.
    pub fn exhaust(&mut self) -> OutOfFuel {
        self.spent = self.limit;
        OutOfFuel
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn predict(&self, sample: &Sample, x: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel>;
}

impl<T: Learner + ?Sized> Learner for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn predict(&self, sample: &Sample, x: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        (**self).predict(sample, x, meter)
    }
}

impl<T: Learner + ?Sized> Learner for std::sync::Arc<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn predict(&self, sample: &Sample, x: Point, meter: &mut Meter) -> Result<Bit, OutOfFuel> {
        (**self).predict(sample, x, meter)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prediction {
    Bit(Bit),
    Diverged { steps_spent: u64 },
}

impl Prediction {
    pub fn bit(self) -> Option<Bit> {
        match self {
            Prediction::Bit(b) => Some(b),
            Prediction::Diverged { .. } => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Prediction::Bit(false) => "0",
            Prediction::Bit(true) => "1",
            Prediction::Diverged { .. } => "diverged",
        }
    }
}

impl Serialize for Prediction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

/// A prediction together with the steps it cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metered {
    pub prediction: Prediction,
    pub steps: u64,
}

/// Runs one prediction with the given fuel.
pub fn query<L: Learner + ?Sized>(l: &L, sample: &Sample, x: Point, budget: u64) -> Metered {
    let mut meter = Meter::new(budget);
    let prediction = match l.predict(sample, x, &mut meter) {
        Ok(b) => Prediction::Bit(b),
        Err(OutOfFuel) => Prediction::Diverged {
            steps_spent: meter.spent(),
        },
    };
    Metered {
        prediction,
        steps: meter.spent(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub x: Point,
    pub predicted: Prediction,
    pub truth: Bit,
}

impl Serialize for Round {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.predicted)?;
        t.serialize_element(&u8::from(self.truth))?;
        t.end()
    }
}

/// `{"learner": name, "rounds": [[x, "0"|"1"|"diverged", y], ...], "mistakes": m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameTranscript {
    pub learner: String,
    pub rounds: Vec<Round>,
    pub mistakes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diverged_at: Option<usize>,
}

/// Feeds `s` to the learner one pair at a time, revealing each label after
/// the prediction. Stops at the first divergence, whose round is recorded.
pub fn run_game<L: Learner + ?Sized>(l: &L, s: &Sample, budget_per_round: u64) -> GameTranscript {
    let mut rounds = Vec::with_capacity(s.len());
    let mut mistakes = 0;
    let mut diverged_at = None;
    let mut history = Sample::new();
    for (i, &(x, truth)) in s.iter().enumerate() {
        let predicted = query(l, &history, x, budget_per_round).prediction;
        rounds.push(Round { x, predicted, truth });
        match predicted {
            Prediction::Bit(b) => {
                if b != truth {
                    mistakes += 1;
                }
            }
            Prediction::Diverged { .. } => {
                diverged_at = Some(i);
                break;
            }
        }
        history.push(x, truth);
    }
    GameTranscript {
        learner: l.name(),
        rounds,
        mistakes,
        diverged_at,
    }
}

/// The first point of the domain where the learner's hypothesis diverged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub point: Point,
    pub steps_spent: u64,
}

/// The learner's hypothesis after `s`, evaluated on every point of the domain.
pub fn induced_hypothesis<L: Learner + ?Sized>(
    l: &L,
    s: &Sample,
    domain_size: usize,
    budget: u64,
) -> Result<Hypothesis, Divergence> {
    let mut h = Hypothesis::zeros(domain_size);
    for x in 0..domain_size {
        match query(l, s, x, budget).prediction {
            Prediction::Bit(b) => h.set(x, b),
            Prediction::Diverged { steps_spent } => return Err(Divergence { point: x, steps_spent }),
        }
    }
    Ok(h)
}
