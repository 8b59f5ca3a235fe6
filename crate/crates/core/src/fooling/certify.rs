use std::sync::Arc;

use serde::Serialize;

use crate::config::enum_cap;
use crate::dimensions::LdimSolver;
use crate::error::{LabError, Result};
use crate::hypothesis::{FiniteClass, Hypothesis, Point};

use super::many::BlockLayout;
use super::stream::RestrictionStream;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockGroup {
    pub block: usize,
    pub functions: Vec<Hypothesis>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    OnesInSeveralBlocks { function: Hypothesis, blocks: Vec<usize> },
    OversizedBlock { block: usize, functions: Vec<Hypothesis> },
    LdimAboveTwo { ldim: i32 },
}

/// The class on the prefix split as `{all-0} ∪ H_1 ∪ H_2 ...`, where `H_i`
/// holds the functions whose ones all lie in block `i`.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub prefix_size: usize,
    pub class_size: usize,
    pub contains_all_zero: bool,
    pub groups: Vec<BlockGroup>,
    pub ldim: i32,
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Materializes the class on the prefix, checks that each block contributes
/// at most two functions and that no function has ones in two blocks, and
/// computes the Littlestone dimension directly.
pub fn certify_ldim_le_2(stream: &RestrictionStream, layout: &BlockLayout) -> Result<Certificate> {
    let n = layout.prefix_size();
    let members = materialize(stream, n, enum_cap()?)?;
    let mut groups: Vec<BlockGroup> = Vec::new();
    let mut violations = Vec::new();
    let mut contains_all_zero = false;
    for f in &members {
        let mut blocks: Vec<usize> = f.ones().map(|x| layout.block_of(x)).collect();
        blocks.sort_unstable();
        blocks.dedup();
        match blocks[..] {
            [] => contains_all_zero = true,
            [i] => match groups.iter_mut().find(|g| g.block == i) {
                Some(g) => g.functions.push(f.clone()),
                None => groups.push(BlockGroup {
                    block: i,
                    functions: vec![f.clone()],
                }),
            },
            _ => violations.push(Violation::OnesInSeveralBlocks {
                function: f.clone(),
                blocks,
            }),
        }
    }
    groups.sort_by_key(|g| g.block);
    for g in &groups {
        if g.functions.len() > 2 {
            violations.push(Violation::OversizedBlock {
                block: g.block,
                functions: g.functions.clone(),
            });
        }
    }
    let class = FiniteClass::new(n, members)?;
    let ldim = LdimSolver::new(Arc::new(class.clone())).ldim();
    if ldim > 2 {
        violations.push(Violation::LdimAboveTwo { ldim });
    }
    Ok(Certificate {
        prefix_size: n,
        class_size: class.len(),
        contains_all_zero,
        groups,
        ldim,
        ok: violations.is_empty(),
        violations,
    })
}

/// Every function on `0..n` avoiding the stream, by depth-first search that
/// prunes a branch as soon as a forbidden cylinder is fully matched. Fails
/// once more than `cap` nodes are visited.
pub fn materialize(stream: &RestrictionStream, n: usize, cap: u128) -> Result<Vec<Hypothesis>> {
    // cylinders keyed by their largest point; conflicting ones forbid nothing
    let mut by_last: Vec<Vec<Vec<(Point, bool)>>> = vec![Vec::new(); n];
    for r in stream.restrictions() {
        if !r.forbid.is_self_consistent() {
            continue;
        }
        match r.forbid.max_point() {
            None => return Ok(Vec::new()),
            Some(m) if m >= n => {
                return Err(LabError::Precondition(format!(
                    "restriction mentions point {m}, outside the prefix of size {n}"
                )))
            }
            Some(m) => by_last[m].push(r.forbid.pairs().to_vec()),
        }
    }
    let mut out = Vec::new();
    let mut bits = Vec::with_capacity(n);
    let mut visited = 0u128;
    dfs(&by_last, n, &mut bits, &mut out, &mut visited, cap)?;
    Ok(out)
}

fn dfs(
    by_last: &[Vec<Vec<(Point, bool)>>],
    n: usize,
    bits: &mut Vec<bool>,
    out: &mut Vec<Hypothesis>,
    visited: &mut u128,
    cap: u128,
) -> Result<()> {
    let p = bits.len();
    if p == n {
        out.push(Hypothesis::from_bits(bits));
        return Ok(());
    }
    for b in [false, true] {
        *visited += 1;
        if *visited > cap {
            return Err(LabError::ResourceGuard {
                what: "prefix class search nodes".into(),
                needed: *visited,
                cap,
            });
        }
        bits.push(b);
        let hit = by_last[p]
            .iter()
            .any(|c| c.iter().all(|&(x, v)| bits[x] == v));
        if !hit {
            dfs(by_last, n, bits, out, visited, cap)?;
        }
        bits.pop();
    }
    Ok(())
}
