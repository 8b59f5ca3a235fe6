//! Effectively closed classes as streams of forbidden cylinders, and the
//! diagonalization that builds a class fooling each of a list of budgeted
//! learners while keeping Littlestone dimension at most 2.

mod certify;
mod cylinders;
mod many;
mod single;
mod stream;

pub use certify::{certify_ldim_le_2, materialize, BlockGroup, Certificate, Violation};
pub use cylinders::{cylinder_in_union, cylinder_in_union_capped, enumerate_nonrealizable, DEFAULT_SUPPORT_CAP};
pub use many::{first_type_restrictions, fool_many, fool_many_with, weaken, BlockLayout, ManyRun};
pub use single::{fool_single, required_block_size, FoolingState, FoolingVerdict, Phase, SingleRun};
pub use stream::{Origin, Restriction, RestrictionStream};
