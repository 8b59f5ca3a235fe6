//! Desk-scale computable online learning on explicit finite hypothesis classes.

#![allow(clippy::result_large_err)]

mod bits;
pub mod adversary;
pub mod config;
pub mod conversions;
pub mod dimensions;
pub mod error;
pub mod fooling;
pub mod gen;
pub mod hypothesis;
pub mod learners;
pub mod par;
pub mod selftest;

pub use bits::Subset;
pub use error::{FaultKind, LabError, OracleFault, Result};
pub use hypothesis::{Bit, Cylinder, FiniteClass, Hypothesis, Point, Sample};
