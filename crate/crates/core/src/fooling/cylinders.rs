use std::collections::BTreeSet;

use crate::config::{enum_cap, guard};
use crate::error::{LabError, Result};
use crate::hypothesis::{Cylinder, Point, Sample};

use super::stream::RestrictionStream;

/// Default ceiling on the number of points `cylinder_in_union` enumerates.
pub const DEFAULT_SUPPORT_CAP: usize = 20;

/// Whether every total function in `c` lies in some cylinder of `forbidden`.
/// Brute force over the bit assignments of the combined support.
pub fn cylinder_in_union(c: &Cylinder, forbidden: &[Cylinder]) -> Result<bool> {
    cylinder_in_union_capped(c, forbidden, DEFAULT_SUPPORT_CAP)
}

pub fn cylinder_in_union_capped(c: &Cylinder, forbidden: &[Cylinder], support_cap: usize) -> Result<bool> {
    if c.is_empty_set() {
        return Ok(true);
    }
    // Empty forbidden cylinders and ones contradicting c cover nothing of c.
    let relevant: Vec<&Sample> = forbidden
        .iter()
        .map(|f| &f.sample)
        .filter(|s| s.is_self_consistent() && compatible(&c.sample, s))
        .collect();
    let support: BTreeSet<Point> = c
        .sample
        .iter()
        .chain(relevant.iter().flat_map(|s| s.iter()))
        .map(|&(x, _)| x)
        .collect();
    if support.len() > support_cap {
        return Err(LabError::ResourceGuard {
            what: "cylinder support points".into(),
            needed: support.len() as u128,
            cap: support_cap as u128,
        });
    }
    let support: Vec<Point> = support.into_iter().collect();
    let local = |s: &Sample| -> (u32, u32) {
        s.iter().fold((0, 0), |(care, value), &(x, b)| {
            let bit = 1u32 << support.binary_search(&x).expect("point in support");
            (care | bit, if b { value | bit } else { value })
        })
    };
    let (c_care, c_value) = local(&c.sample);
    let masks: Vec<(u32, u32)> = relevant.iter().map(|s| local(s)).collect();
    let full = if support.len() == 32 { u32::MAX } else { (1u32 << support.len()) - 1 };
    let free = full & !c_care;
    // walk every subset of `free`
    let mut sub = 0u32;
    loop {
        let f = c_value | sub;
        if !masks.iter().any(|&(care, value)| f & care == value) {
            return Ok(false);
        }
        if sub == free {
            return Ok(true);
        }
        sub = sub.wrapping_sub(free) & free;
    }
}

fn compatible(a: &Sample, b: &Sample) -> bool {
    a.iter().all(|&(x, v)| b.iter().all(|&(y, w)| x != y || v == w))
}

/// Every sample over `support` whose cylinder the stream already covers.
///
/// A sample gives each support point no label, a single label, or both labels
/// (the conflicting case), so there are `4^|support|` candidates, listed in
/// base-4 counting order with the first support point least significant.
pub fn enumerate_nonrealizable(stream: &RestrictionStream, support: &[Point]) -> Result<Vec<Sample>> {
    let mut support = support.to_vec();
    support.sort_unstable();
    support.dedup();
    let count = 4u128.checked_pow(support.len() as u32);
    guard("samples over the support", count, enum_cap()?)?;
    let forbidden = stream.cylinders();
    let mut out = Vec::new();
    for code in 0..count.unwrap_or(0) {
        let mut rest = code;
        let mut s = Sample::new();
        for &x in &support {
            match rest % 4 {
                1 => s.push(x, false),
                2 => s.push(x, true),
                3 => {
                    s.push(x, false);
                    s.push(x, true);
                }
                _ => {}
            }
            rest /= 4;
        }
        if cylinder_in_union(&Cylinder::new(s.clone()), &forbidden)? {
            out.push(s);
        }
    }
    Ok(out)
}
