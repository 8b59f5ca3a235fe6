use std::collections::BTreeSet;

use serde::Serialize;

use crate::dimensions::{tree_count, LeafOracle, TreeEnumerator};
use crate::error::{FaultKind, LabError, OracleFault, Result};
use crate::hypothesis::{FiniteClass, Hypothesis, Point, Sample};
use crate::par::{self, Exec};

/// Largest sub-domain we materialize functions on.
pub const MAX_SUB_DOMAIN: usize = 20;

/// All functions on a finite sub-domain that avoid every sample in a
/// collection of non-realizable samples.
///
/// Members are stored as a [`FiniteClass`] over local indices: position `j`
/// stands for `sub_domain[j]`.
#[derive(Clone, Debug, Serialize)]
pub struct InducedFiniteClass {
    sub_domain: Vec<Point>,
    #[serde(skip)]
    members: FiniteClass,
    forbidden: usize,
}

impl InducedFiniteClass {
    /// `sub_domain` is sorted and deduplicated first. Samples touching points
    /// outside it are rejected.
    pub fn new(sub_domain: &[Point], forbidden: impl IntoIterator<Item = Sample>) -> Result<Self> {
        let mut dom = sub_domain.to_vec();
        dom.sort_unstable();
        dom.dedup();
        if dom.is_empty() || dom.len() > MAX_SUB_DOMAIN {
            return Err(LabError::ResourceGuard {
                what: "materializing functions on a sub-domain".into(),
                needed: dom.len() as u128,
                cap: MAX_SUB_DOMAIN as u128,
            });
        }
        let mut patterns = BTreeSet::new();
        for s in forbidden {
            if let Some(p) = mask_pattern(&dom, &s)? {
                patterns.insert(p);
            }
        }
        let n = dom.len();
        let members = (0..1u64 << n)
            .filter(|&f| patterns.iter().all(|&(care, value)| f & care != value))
            .map(|f| Hypothesis::from_mask(n, f));
        Ok(InducedFiniteClass {
            members: FiniteClass::new(n, members)?,
            sub_domain: dom,
            forbidden: patterns.len(),
        })
    }

    pub fn sub_domain(&self) -> &[Point] {
        &self.sub_domain
    }

    /// The members, over local indices.
    pub fn members(&self) -> &FiniteClass {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of distinct self-consistent forbidden samples.
    pub fn forbidden_count(&self) -> usize {
        self.forbidden
    }

    /// Rewrites a sample over the sub-domain into local indices.
    pub fn localize(&self, s: &Sample) -> Result<Sample> {
        s.iter()
            .map(|&(x, b)| {
                self.sub_domain
                    .binary_search(&x)
                    .map(|j| (j, b))
                    .map_err(|_| LabError::Domain {
                        point: x,
                        domain_size: self.sub_domain.len(),
                    })
            })
            .collect::<Result<Vec<_>>>()
            .map(Sample::from_pairs)
    }

    pub fn realizes(&self, s: &Sample) -> Result<bool> {
        Ok(self.members.realizes_unchecked(&self.localize(s)?))
    }

    /// Whether the restriction of `f` to the sub-domain is a member.
    pub fn contains_restriction(&self, f: &Hypothesis) -> Result<bool> {
        let bits = self
            .sub_domain
            .iter()
            .map(|&x| f.try_get(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.members.contains(&Hypothesis::from_bits(&bits)))
    }
}

/// `(care, value)` with `f` consistent iff `f & care == value`; `None` for a
/// self-contradictory sample, which no function matches.
fn mask_pattern(dom: &[Point], s: &Sample) -> Result<Option<(u64, u64)>> {
    let (mut care, mut value) = (0u64, 0u64);
    for &(x, y) in s.iter() {
        let j = dom.binary_search(&x).map_err(|_| LabError::Domain {
            point: x,
            domain_size: dom.len(),
        })?;
        let bit = 1u64 << j;
        if care & bit != 0 && (value & bit != 0) != y {
            return Ok(None);
        }
        care |= bit;
        if y {
            value |= bit;
        }
    }
    Ok(Some((care, value)))
}

/// Runs `a` on every tree of its depth labeled from `alphabet` and returns
/// the indicated leaf samples in enumeration order, with the tree count.
pub(crate) fn leaf_oracle_samples(
    a: &dyn LeafOracle,
    alphabet: &[Point],
    cap: u128,
    exec: Exec,
) -> Result<(Vec<Sample>, u128)> {
    let depth = a.depth();
    let count = crate::config::guard(
        "enumerating trees for a leaf oracle",
        tree_count(depth, alphabet.len()),
        cap,
    )?;
    let samples = par::try_map_range(exec, count as usize, |i| {
        let tree = TreeEnumerator::nth_tree(depth, alphabet, i as u128);
        let leaf = a.answer(&tree)?;
        tree.leaf_sample(&leaf).map_err(|e| {
            OracleFault::new(FaultKind::ShapeMismatch, e.to_string())
                .with_tree(&tree)
                .with_answer(&leaf)
        })
    })?;
    Ok((samples, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smp(pairs: &[(Point, u8)]) -> Sample {
        Sample::from_pairs(pairs.iter().map(|&(x, y)| (x, y == 1)))
    }

    #[test]
    fn forbidding_cylinders() {
        // forbid f(3)=1 and (f(5)=0, f(7)=1): 8 - 4 - 1 = 3 survivors
        let c = InducedFiniteClass::new(&[7, 3, 5], [smp(&[(3, 1)]), smp(&[(5, 0), (7, 1)])]).unwrap();
        assert_eq!(c.sub_domain(), &[3, 5, 7]);
        assert_eq!(c.len(), 3);
        assert!(!c.realizes(&smp(&[(3, 1)])).unwrap());
        assert!(c.realizes(&smp(&[(5, 1), (7, 1)])).unwrap());
        assert!(c.realizes(&smp(&[(4, 1)])).is_err());
        // contradictory samples forbid nothing
        let c = InducedFiniteClass::new(&[0], [smp(&[(0, 1), (0, 0)])]).unwrap();
        assert_eq!((c.len(), c.forbidden_count()), (2, 0));
    }

    #[test]
    fn restrictions_of_avoiders_survive() {
        let f = Hypothesis::parse("0110").unwrap();
        let c = InducedFiniteClass::new(&[1, 3], [smp(&[(1, 0)])]).unwrap();
        assert!(c.contains_restriction(&f).unwrap());
        let g = Hypothesis::parse("0010").unwrap();
        assert!(!c.contains_restriction(&g).unwrap());
    }
}
