//! Littlestone trees, Littlestone and threshold dimensions, and the brute
//! force oracles every other module is checked against.

mod ldim;
mod oracles;
mod tdim;
mod tree;

use serde::Serialize;

pub use ldim::{
    ldim, ldim_by_enumeration, ldim_by_trees, ldim_clamped, realizable_tree, LdimSolver,
};
pub use oracles::{
    audit_leaf, audit_threshold, brute_leaf_oracle, brute_threshold_oracle, BruteLeafOracle,
    BruteThresholdOracle, FnLeafOracle, FnThresholdOracle, LeafOracle, ThresholdOracle,
};
pub(crate) use oracles::{check_sequence_shape, check_tree_shape};
pub use tdim::{tdim, threshold_sample, ThresholdWitness};
pub use tree::{enumerate_trees, tree_count, LeafAddress, LittlestoneTree, TreeEnumerator, MAX_TREE_DEPTH};

use crate::hypothesis::{FiniteClass, Point};
use crate::par::Exec;

/// Outcome of a search with an explicit budget. Running out of budget is an
/// answer, not an error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Budgeted<T> {
    Within(T),
    Exceeded,
}

impl<T> Budgeted<T> {
    pub fn within(self) -> Option<T> {
        match self {
            Budgeted::Within(v) => Some(v),
            Budgeted::Exceeded => None,
        }
    }

    pub fn is_exceeded(&self) -> bool {
        matches!(self, Budgeted::Exceeded)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionMethod {
    Recursive,
    Trees,
}

/// `{"ldim": d, "tdim": t, "witness_sequence": [...], "method": ...}`.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    /// `null` when the tree search ran out of budget; `-1` for the empty class
    /// under the recursive method.
    pub ldim: Option<i32>,
    /// `null` when the threshold search ran out of budget.
    pub tdim: Option<usize>,
    pub witness_sequence: Vec<Point>,
    pub method: DimensionMethod,
}

pub fn dimension_report(
    h: &FiniteClass,
    method: DimensionMethod,
    max_d: usize,
    max_t: usize,
) -> DimensionReport {
    let ldim = match method {
        DimensionMethod::Recursive => Some(ldim(h)),
        DimensionMethod::Trees => ldim_by_trees(h, max_d, Exec::default())
            .within()
            .map(|d| d as i32),
    };
    let (tdim, witness_sequence) = match tdim(h, max_t) {
        Budgeted::Within(w) => (Some(w.tdim), w.sequence),
        Budgeted::Exceeded => (None, Vec::new()),
    };
    DimensionReport {
        ldim,
        tdim,
        witness_sequence,
        method,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_for_two_constants() {
        let h = FiniteClass::from_strs(3, &["000", "111"]).unwrap();
        let r = dimension_report(&h, DimensionMethod::Recursive, 4, 4);
        assert_eq!(r.ldim, Some(1));
        assert_eq!(r.tdim, Some(1));
        assert_eq!(r.witness_sequence, vec![0]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["method"], "recursive");
        let r = dimension_report(&h, DimensionMethod::Trees, 4, 4);
        assert_eq!(r.ldim, Some(1));
    }
}
