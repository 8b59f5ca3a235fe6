//! Seeded random classes for tests, the self-test and the CLI.

use std::ops::RangeInclusive;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dimensions::ldim;
use crate::error::{LabError, Result};
use crate::hypothesis::{FiniteClass, Hypothesis};

pub type ClassRng = ChaCha8Rng;

pub fn rng(seed: u64) -> ClassRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonempty class of `1..=max_size` distinct functions on `domain_size`
/// points, chosen uniformly among the `2^domain_size` functions.
pub fn random_class<R: Rng + ?Sized>(rng: &mut R, domain_size: usize, max_size: usize) -> Result<FiniteClass> {
    if domain_size == 0 || domain_size > 20 {
        return Err(LabError::Config(format!("random classes need 1..=20 points, got {domain_size}")));
    }
    let total = 1usize << domain_size;
    let size = rng.gen_range(1..=max_size.clamp(1, total));
    let masks = sample_indices(rng, total, size);
    FiniteClass::new(
        domain_size,
        masks.into_iter().map(|m| Hypothesis::from_mask(domain_size, m as u64)),
    )
}

/// Draws random classes until one has Littlestone dimension in `dims`.
pub fn random_class_with_ldim<R: Rng + ?Sized>(
    rng: &mut R,
    domain_size: usize,
    max_size: usize,
    dims: RangeInclusive<i32>,
    attempts: usize,
) -> Result<FiniteClass> {
    for _ in 0..attempts {
        let h = random_class(rng, domain_size, max_size)?;
        if dims.contains(&ldim(&h)) {
            return Ok(h);
        }
    }
    Err(LabError::Config(format!(
        "no class with ldim in {dims:?} after {attempts} draws at domain size {domain_size}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = random_class(&mut rng(9), 4, 6).unwrap();
        let b = random_class(&mut rng(9), 4, 6).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty() && a.len() <= 6);
    }

    #[test]
    fn ldim_filter() {
        let mut r = rng(1);
        for _ in 0..20 {
            let h = random_class_with_ldim(&mut r, 4, 8, 1..=1, 1000).unwrap();
            assert_eq!(ldim(&h), 1);
        }
        assert!(random_class_with_ldim(&mut r, 2, 1, 2..=2, 10).is_err());
    }
}
