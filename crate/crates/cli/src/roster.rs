use littlestone_lab::learners::{
    eldim1_learner, soa, ConstantLearner, InvertedSoa, Learner, LoopingLearner, MajorityLearner, SeededLearner,
};
use littlestone_lab::FiniteClass;

use crate::report::Failure;

pub const NAMES: &str = "soa, inverted-soa, eldim1, majority, constant-0, constant-1, looping, seeded-N";

/// Resolves a learner name. Class-based learners need `class`.
pub fn learner(name: &str, class: Option<&FiniteClass>) -> Result<Box<dyn Learner>, Failure> {
    let need = || {
        class.ok_or_else(|| Failure::Usage(format!("learner {name} needs --class")))
    };
    Ok(match name {
        "soa" => Box::new(soa(need()?)?),
        "inverted-soa" => Box::new(InvertedSoa::new(need()?)?),
        "eldim1" => Box::new(eldim1_learner(need()?)?),
        "majority" => Box::new(MajorityLearner),
        "constant-0" => Box::new(ConstantLearner::new(false)),
        "constant-1" => Box::new(ConstantLearner::new(true)),
        "looping" => Box::new(LoopingLearner),
        other => match other.strip_prefix("seeded-").map(str::parse::<u64>) {
            Some(Ok(seed)) => Box::new(SeededLearner::new(seed)),
            _ => return Err(Failure::Usage(format!("unknown learner {other:?}; known: {NAMES}"))),
        },
    })
}
