use serde::Serialize;

use crate::error::{LabError, Result};
use crate::hypothesis::{Point, Sample};
use crate::learners::Learner;
use crate::par::{self, Exec};

use super::single::{fool_block, FoolingState, FoolingVerdict};
use super::stream::{Origin, Restriction, RestrictionStream};

/// Round-robin blocks over the prefix `0..blocks * points_per_block`: point
/// `j` of block `i` is `i + j * blocks`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockLayout {
    pub blocks: usize,
    pub points_per_block: usize,
}

impl BlockLayout {
    pub fn new(blocks: usize, points_per_block: usize) -> Result<Self> {
        if blocks == 0 {
            return Err(LabError::Config("at least one block is needed".into()));
        }
        blocks
            .checked_mul(points_per_block)
            .ok_or_else(|| LabError::Config("prefix size overflows".into()))?;
        Ok(BlockLayout {
            blocks,
            points_per_block,
        })
    }

    pub fn prefix_size(&self) -> usize {
        self.blocks * self.points_per_block
    }

    pub fn block(&self, i: usize) -> Vec<Point> {
        (0..self.points_per_block).map(|j| i + j * self.blocks).collect()
    }

    pub fn block_of(&self, x: Point) -> usize {
        x % self.blocks
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ManyRun {
    pub layout: BlockLayout,
    pub verdicts: Vec<FoolingVerdict>,
    pub states: Vec<FoolingState>,
    pub stream: RestrictionStream,
    /// For each verdict, whether all its witnesses avoid the full stream.
    pub witness_checks: Vec<bool>,
}

/// `R ∧ f(y) = 1` for every `y` in the block, skipping the empty cylinders.
/// Any function with a 1 in the block that lies in `R` lies in one of them.
pub fn weaken(r: &Restriction, block: &[Point]) -> Vec<Restriction> {
    let mut out: Vec<Restriction> = Vec::with_capacity(block.len());
    for &y in block {
        let forbid = if r.forbid.iter().any(|&(x, b)| x == y && b) {
            r.forbid.clone()
        } else if r.forbid.iter().any(|&(x, _)| x == y) {
            continue;
        } else {
            r.forbid.with(y, true)
        };
        if !out.iter().any(|o| o.forbid == forbid) {
            out.push(Restriction::new(forbid, r.origin));
        }
    }
    out
}

/// Forbids value 1 at any two prefix points in different blocks.
pub fn first_type_restrictions(layout: &BlockLayout) -> RestrictionStream {
    let n = layout.prefix_size();
    let mut s = RestrictionStream::new();
    for p in 0..n {
        for q in p + 1..n {
            if layout.block_of(p) != layout.block_of(q) {
                s.push(Restriction::new(Sample::from_pairs([(p, true), (q, true)]), Origin::FirstType));
            }
        }
    }
    s
}

/// One block per learner. Blocks run independently and their emissions are
/// merged in block order after the first-type restrictions, so the stream is
/// the same under either execution strategy.
pub fn fool_many<L: Learner>(learners: &[L], points_per_block: usize, fuel: u64, max_iterations: usize) -> Result<ManyRun> {
    fool_many_with(learners, points_per_block, fuel, max_iterations, Exec::default())
}

pub fn fool_many_with<L: Learner>(
    learners: &[L],
    points_per_block: usize,
    fuel: u64,
    max_iterations: usize,
    exec: Exec,
) -> Result<ManyRun> {
    let layout = BlockLayout::new(learners.len(), points_per_block)?;
    let domain = layout.prefix_size();
    let runs = par::try_map_range(exec, learners.len(), |i| {
        let block = layout.block(i);
        let run = fool_block(&learners[i], &block, i, domain, fuel, max_iterations)?;
        let mut weak = RestrictionStream::new();
        for r in run.stream.restrictions() {
            for w in weaken(r, &block) {
                weak.push(w);
            }
        }
        Ok::<_, LabError>((run.verdict, run.state, weak))
    })?;

    let mut stream = first_type_restrictions(&layout);
    let mut verdicts = Vec::with_capacity(runs.len());
    let mut states = Vec::with_capacity(runs.len());
    for (verdict, state, weak) in runs {
        stream.append(weak);
        verdicts.push(verdict);
        states.push(state);
    }
    let witness_checks = verdicts
        .iter()
        .map(|v| v.witnesses().into_iter().all(|w| stream.admits(w)))
        .collect();
    Ok(ManyRun {
        layout,
        verdicts,
        states,
        stream,
        witness_checks,
    })
}
