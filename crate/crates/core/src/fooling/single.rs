use std::collections::HashSet;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::hypothesis::{Bit, Hypothesis, Point, Sample};
use crate::learners::{query, run_game, GameTranscript, Learner, Prediction};

use super::stream::{Origin, Restriction, RestrictionStream};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Phase {
    /// A query is outstanding.
    Probing { pending: Point, fuel_spent: u64, emitted: usize },
    HaltedWith { prediction: Bit },
    /// The last probe used all its fuel; `emitted` equality restrictions were
    /// listed while it ran.
    Diverged { pending: Point, fuel_spent: u64, emitted: usize },
}

/// Progress of the construction on one block. Anchors, bits and run lengths
/// are parallel lists; anchor `m + 1` sits `run_lengths[m]` block positions
/// after anchor `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoolingState {
    pub block: usize,
    pub block_points: Vec<Point>,
    pub iteration: usize,
    pub anchors: Vec<Point>,
    pub bits: Vec<Bit>,
    pub run_lengths: Vec<usize>,
    pub sample: Sample,
    pub phase: Phase,
    /// Block points tied to the last pending anchor when the construction
    /// stopped, standing in for the restrictions it would keep listing.
    pub sealed: Vec<Point>,
    /// Outcome of the explicit witness check at each iteration boundary,
    /// starting with the empty sample.
    pub realizability_checks: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FoolingVerdict {
    /// The learner ran out of fuel on `(sample, point)`, and the sample is
    /// realizable: both witnesses avoid the stream and agree with it.
    DivergedOnRealizable {
        learner: String,
        sample: Sample,
        point: Point,
        steps_spent: u64,
        witnesses: [Hypothesis; 2],
        /// The sample followed by the diverging query.
        transcript: GameTranscript,
    },
    /// The learner erred on every anchor; `witness` labels them all.
    ForcedMistakes {
        learner: String,
        count: usize,
        witness: Hypothesis,
        points: Vec<Point>,
        transcript: GameTranscript,
    },
}

impl FoolingVerdict {
    pub fn is_forced(&self) -> bool {
        matches!(self, FoolingVerdict::ForcedMistakes { .. })
    }

    pub fn witnesses(&self) -> Vec<&Hypothesis> {
        match self {
            FoolingVerdict::DivergedOnRealizable { witnesses, .. } => witnesses.iter().collect(),
            FoolingVerdict::ForcedMistakes { witness, .. } => vec![witness],
        }
    }

    pub fn transcript(&self) -> &GameTranscript {
        match self {
            FoolingVerdict::DivergedOnRealizable { transcript, .. } | FoolingVerdict::ForcedMistakes { transcript, .. } => {
                transcript
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleRun {
    pub verdict: FoolingVerdict,
    pub stream: RestrictionStream,
    pub state: FoolingState,
}

/// Points a block needs for `max_iterations` probes at `fuel` steps each,
/// plus the anchor left pending at the end.
pub fn required_block_size(fuel: u64, max_iterations: usize) -> Option<usize> {
    usize::try_from(fuel.max(1))
        .ok()?
        .checked_mul(max_iterations)?
        .checked_add(1)
}

/// Builds a class on `block` that `l` fails on: it either diverges on a
/// realizable sample or errs on each of `max_iterations` anchors. Witness
/// functions are defined on `0..=max(block)` and vanish off the block.
pub fn fool_single<L: Learner + ?Sized>(l: &L, block: &[Point], fuel: u64, max_iterations: usize) -> Result<SingleRun> {
    let domain = block.iter().max().map_or(0, |&m| m + 1);
    fool_block(l, block, 0, domain, fuel, max_iterations)
}

pub(crate) fn fool_block<L: Learner + ?Sized>(
    l: &L,
    block: &[Point],
    block_id: usize,
    domain: usize,
    fuel: u64,
    max_iterations: usize,
) -> Result<SingleRun> {
    let need = required_block_size(fuel, max_iterations)
        .ok_or_else(|| LabError::Config("block size overflows".into()))?;
    if block.len() < need {
        return Err(LabError::Config(format!(
            "block {block_id} has {} points, {need} needed for {max_iterations} probes at fuel {fuel}",
            block.len()
        )));
    }
    let mut seen = HashSet::new();
    if let Some(x) = block.iter().find(|&&x| !seen.insert(x)) {
        return Err(LabError::Config(format!("block {block_id} repeats point {x}")));
    }
    if let Some(x) = block.iter().find(|&&x| x >= domain) {
        return Err(LabError::Config(format!("block point {x} is outside the domain of size {domain}")));
    }

    let mut run = Builder {
        block,
        domain,
        stream: RestrictionStream::new(),
        state: FoolingState {
            block: block_id,
            block_points: block.to_vec(),
            iteration: 0,
            anchors: Vec::new(),
            bits: Vec::new(),
            run_lengths: Vec::new(),
            sample: Sample::new(),
            phase: Phase::Probing {
                pending: block[0],
                fuel_spent: 0,
                emitted: 0,
            },
            sealed: Vec::new(),
            realizability_checks: Vec::new(),
        },
        next: 0,
    };
    run.check_realizable();

    let equality = Origin::BlockEquality(block_id);
    for _ in 0..max_iterations {
        let a = run.next;
        let x = block[a];
        let metered = query(l, &run.state.sample, x, fuel);
        match metered.prediction {
            Prediction::Bit(p) => {
                // the step that produced the answer lists nothing
                let emitted = metered.steps.saturating_sub(1) as usize;
                for j in 1..=emitted {
                    run.tie(a, a + j, equality);
                }
                let k = emitted + 1;
                let b = !p;
                run.stream
                    .push(Restriction::new(Sample::from_pairs([(x, p)]), Origin::BlockValue(block_id)));
                run.state.anchors.push(x);
                run.state.bits.push(b);
                run.state.run_lengths.push(k);
                run.state.sample.push(x, b);
                run.state.iteration += 1;
                run.state.phase = Phase::HaltedWith { prediction: p };
                run.next = a + k;
                run.check_realizable();
            }
            Prediction::Diverged { steps_spent } => {
                let emitted = fuel as usize;
                for j in 1..=emitted {
                    run.tie(a, a + j, equality);
                }
                run.state.phase = Phase::Diverged {
                    pending: x,
                    fuel_spent: steps_spent,
                    emitted,
                };
                run.seal(a, a + emitted + 1);
                let witnesses = [run.witness(false), run.witness(true)];
                let history = run.state.sample.clone();
                let transcript = run_game(l, &history.with(x, false), fuel);
                let verdict = FoolingVerdict::DivergedOnRealizable {
                    learner: l.name(),
                    sample: history,
                    point: x,
                    steps_spent,
                    witnesses,
                    transcript,
                };
                return Ok(run.finish(verdict));
            }
        }
    }

    let a = run.next;
    run.seal(a, a + 1);
    let tail = run.state.bits.last().copied().unwrap_or(false);
    let witness = run.witness(tail);
    let transcript = run_game(l, &run.state.sample, fuel);
    let verdict = FoolingVerdict::ForcedMistakes {
        learner: l.name(),
        count: run.state.iteration,
        witness,
        points: run.state.anchors.clone(),
        transcript,
    };
    Ok(run.finish(verdict))
}

struct Builder<'a> {
    block: &'a [Point],
    domain: usize,
    stream: RestrictionStream,
    state: FoolingState,
    /// Block index of the next anchor.
    next: usize,
}

impl Builder<'_> {
    fn tie(&mut self, i: usize, j: usize, origin: Origin) {
        for r in Restriction::equality(self.block[i], self.block[j], origin) {
            self.stream.push(r);
        }
    }

    /// Ties block positions `from..` to the anchor at `anchor`.
    fn seal(&mut self, anchor: usize, from: usize) {
        let origin = Origin::BlockEquality(self.state.block);
        for j in from..self.block.len() {
            self.tie(anchor, j, origin);
            self.state.sealed.push(self.block[j]);
        }
    }

    /// The step function fixed by the finished probes, with every later block
    /// point set to `tail` and 0 off the block.
    fn witness(&self, tail: Bit) -> Hypothesis {
        let mut f = Hypothesis::zeros(self.domain);
        let mut i = 0;
        for (&b, &k) in self.state.bits.iter().zip(&self.state.run_lengths) {
            for &x in &self.block[i..i + k] {
                f.set(x, b);
            }
            i += k;
        }
        for &x in &self.block[i..] {
            f.set(x, tail);
        }
        f
    }

    fn check_realizable(&mut self) {
        let tail = self.state.bits.last().copied().unwrap_or(false);
        let w = self.witness(tail);
        let ok = self.stream.admits(&w) && w.agrees(&self.state.sample);
        self.state.realizability_checks.push(ok);
    }

    fn finish(self, verdict: FoolingVerdict) -> SingleRun {
        SingleRun {
            verdict,
            stream: self.stream,
            state: self.state,
        }
    }
}
