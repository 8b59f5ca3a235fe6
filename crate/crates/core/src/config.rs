//! Enumeration resource guards.

use crate::error::{LabError, Result};

pub const ENUM_CAP_VAR: &str = "LLAB_ENUM_CAP";

/// Default ceiling on the number of objects a single enumeration may visit.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 24;

/// The enumeration cap, from `LLAB_ENUM_CAP` when set.
pub fn enum_cap() -> Result<u128> {
    match std::env::var(ENUM_CAP_VAR) {
        Ok(raw) => raw.trim().parse::<u128>().map_err(|_| {
            LabError::Config(format!("{ENUM_CAP_VAR} must be a nonnegative integer, got {raw:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_ENUM_CAP),
        Err(e) => Err(LabError::Config(format!("{ENUM_CAP_VAR}: {e}"))),
    }
}

/// Fails with a resource guard error when `needed` (if known) exceeds `cap`.
/// `None` means the count overflowed.
pub fn guard(what: &str, needed: Option<u128>, cap: u128) -> Result<u128> {
    match needed {
        Some(n) if n <= cap => Ok(n),
        _ => Err(LabError::ResourceGuard {
            what: what.to_string(),
            needed: needed.unwrap_or(u128::MAX),
            cap,
        }),
    }
}
