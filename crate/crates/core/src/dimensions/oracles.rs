//! Leaf oracles (witnesses of Littlestone dimension) and threshold oracles
//! (witnesses of threshold dimension).
//!
//! A leaf oracle of depth `d + 1` promises, for every tree of that depth over
//! its domain, a leaf whose path sample the class does not realize. A
//! threshold oracle of arity `t + 1` promises, for every sequence of that
//! length, an index whose threshold the class does not realize. Broken
//! promises surface as [`OracleFault`] values.

use std::sync::Arc;

use crate::dimensions::tdim::threshold_sample;
use crate::dimensions::tree::{LeafAddress, LittlestoneTree};
use crate::error::{FaultKind, OracleFault};
use crate::hypothesis::{FiniteClass, Point};

pub trait LeafOracle: Send + Sync {
    fn depth(&self) -> usize;
    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault>;
}

impl<T: LeafOracle + ?Sized> LeafOracle for Box<T> {
    fn depth(&self) -> usize {
        (**self).depth()
    }
    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault> {
        (**self).answer(tree)
    }
}

impl<T: LeafOracle + ?Sized> LeafOracle for Arc<T> {
    fn depth(&self) -> usize {
        (**self).depth()
    }
    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault> {
        (**self).answer(tree)
    }
}

pub trait ThresholdOracle: Send + Sync {
    fn arity(&self) -> usize;
    /// A 1-based threshold index.
    fn answer(&self, seq: &[Point]) -> Result<usize, OracleFault>;
}

impl<T: ThresholdOracle + ?Sized> ThresholdOracle for Box<T> {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn answer(&self, seq: &[Point]) -> Result<usize, OracleFault> {
        (**self).answer(seq)
    }
}

impl<T: ThresholdOracle + ?Sized> ThresholdOracle for Arc<T> {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn answer(&self, seq: &[Point]) -> Result<usize, OracleFault> {
        (**self).answer(seq)
    }
}

pub(crate) fn check_tree_shape(
    tree: &LittlestoneTree,
    depth: usize,
    domain_size: Option<usize>,
) -> Result<(), OracleFault> {
    if tree.depth() != depth {
        return Err(OracleFault::new(
            FaultKind::ShapeMismatch,
            format!("oracle takes depth-{depth} trees, got depth {}", tree.depth()),
        )
        .with_tree(tree));
    }
    if let Some(n) = domain_size {
        if tree.max_label() >= n {
            return Err(OracleFault::new(
                FaultKind::ShapeMismatch,
                format!("label {} outside the domain of size {n}", tree.max_label()),
            )
            .with_tree(tree));
        }
    }
    Ok(())
}

/// Scans leaves in lexicographic order and returns the first one the class
/// does not realize.
#[derive(Clone)]
pub struct BruteLeafOracle {
    class: Arc<FiniteClass>,
    depth: usize,
}

pub fn brute_leaf_oracle(h: &FiniteClass, depth: usize) -> BruteLeafOracle {
    BruteLeafOracle {
        class: Arc::new(h.clone()),
        depth,
    }
}

impl BruteLeafOracle {
    pub fn class(&self) -> &FiniteClass {
        &self.class
    }
}

impl LeafOracle for BruteLeafOracle {
    fn depth(&self) -> usize {
        self.depth
    }

    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault> {
        check_tree_shape(tree, self.depth, Some(self.class.domain_size()))?;
        tree.leaves()
            .find(|leaf| !self.class.realizes_unchecked(&tree.path_sample(leaf.bits())))
            .ok_or_else(|| {
                OracleFault::new(
                    FaultKind::ContractViolation,
                    "every leaf of the tree is realizable; the oracle depth does not exceed the dimension",
                )
                .with_tree(tree)
            })
    }
}

/// Scans `i = 1..=arity` and returns the first threshold the class does not realize.
#[derive(Clone)]
pub struct BruteThresholdOracle {
    class: Arc<FiniteClass>,
    arity: usize,
}

pub fn brute_threshold_oracle(h: &FiniteClass, arity: usize) -> BruteThresholdOracle {
    BruteThresholdOracle {
        class: Arc::new(h.clone()),
        arity,
    }
}

impl ThresholdOracle for BruteThresholdOracle {
    fn arity(&self) -> usize {
        self.arity
    }

    fn answer(&self, seq: &[Point]) -> Result<usize, OracleFault> {
        check_sequence_shape(seq, self.arity, Some(self.class.domain_size()))?;
        (1..=self.arity)
            .find(|&i| {
                let s = threshold_sample(seq, i).expect("index in range");
                !self.class.realizes_unchecked(&s)
            })
            .ok_or_else(|| {
                OracleFault::new(
                    FaultKind::ContractViolation,
                    "every threshold on the sequence is realizable",
                )
                .with_sequence(seq)
            })
    }
}

pub(crate) fn check_sequence_shape(
    seq: &[Point],
    arity: usize,
    domain_size: Option<usize>,
) -> Result<(), OracleFault> {
    if seq.len() != arity {
        return Err(OracleFault::new(
            FaultKind::ShapeMismatch,
            format!("oracle takes sequences of length {arity}, got {}", seq.len()),
        )
        .with_sequence(seq));
    }
    if let (Some(n), Some(&m)) = (domain_size, seq.iter().max()) {
        if m >= n {
            return Err(OracleFault::new(
                FaultKind::ShapeMismatch,
                format!("point {m} outside the domain of size {n}"),
            )
            .with_sequence(seq));
        }
    }
    Ok(())
}

/// A leaf oracle backed by a closure, for hand-built and adversarial oracles.
pub struct FnLeafOracle<F> {
    depth: usize,
    f: F,
}

impl<F> FnLeafOracle<F>
where
    F: Fn(&LittlestoneTree) -> Result<LeafAddress, OracleFault> + Send + Sync,
{
    pub fn new(depth: usize, f: F) -> Self {
        FnLeafOracle { depth, f }
    }
}

impl<F> LeafOracle for FnLeafOracle<F>
where
    F: Fn(&LittlestoneTree) -> Result<LeafAddress, OracleFault> + Send + Sync,
{
    fn depth(&self) -> usize {
        self.depth
    }
    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault> {
        (self.f)(tree)
    }
}

pub struct FnThresholdOracle<F> {
    arity: usize,
    f: F,
}

impl<F> FnThresholdOracle<F>
where
    F: Fn(&[Point]) -> Result<usize, OracleFault> + Send + Sync,
{
    pub fn new(arity: usize, f: F) -> Self {
        FnThresholdOracle { arity, f }
    }
}

impl<F> ThresholdOracle for FnThresholdOracle<F>
where
    F: Fn(&[Point]) -> Result<usize, OracleFault> + Send + Sync,
{
    fn arity(&self) -> usize {
        self.arity
    }
    fn answer(&self, seq: &[Point]) -> Result<usize, OracleFault> {
        (self.f)(seq)
    }
}

/// Fails with a witness when `h` realizes the sample of `leaf` in `tree`.
pub fn audit_leaf(h: &FiniteClass, tree: &LittlestoneTree, leaf: &LeafAddress) -> Result<(), OracleFault> {
    let sample = tree.leaf_sample(leaf).map_err(|e| {
        OracleFault::new(FaultKind::ShapeMismatch, e.to_string())
            .with_tree(tree)
            .with_answer(leaf)
    })?;
    match h.realizer(&sample) {
        Ok(None) => Ok(()),
        Ok(Some(f)) => Err(OracleFault::new(
            FaultKind::ContractViolation,
            format!("leaf {leaf} is realizable"),
        )
        .with_tree(tree)
        .with_answer(leaf)
        .with_sample(&sample)
        .with_realizer(Some(f.clone()))),
        Err(e) => Err(OracleFault::new(FaultKind::ShapeMismatch, e.to_string()).with_tree(tree)),
    }
}

/// Fails with a witness when `h` realizes threshold `i` on `seq`.
pub fn audit_threshold(h: &FiniteClass, seq: &[Point], i: usize) -> Result<(), OracleFault> {
    let sample = threshold_sample(seq, i).map_err(|e| {
        OracleFault::new(FaultKind::ShapeMismatch, e.to_string())
            .with_sequence(seq)
            .with_answer(i)
    })?;
    match h.realizer(&sample) {
        Ok(None) => Ok(()),
        Ok(Some(f)) => Err(OracleFault::new(
            FaultKind::ContractViolation,
            format!("threshold {i} is realizable"),
        )
        .with_sequence(seq)
        .with_answer(i)
        .with_sample(&sample)
        .with_realizer(Some(f.clone()))),
        Err(e) => Err(OracleFault::new(FaultKind::ShapeMismatch, e.to_string()).with_sequence(seq)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimensions::tree::enumerate_trees;
    use crate::hypothesis::realizable;

    fn class(n: usize, strs: &[&str]) -> FiniteClass {
        FiniteClass::from_strs(n, strs).unwrap()
    }

    #[test]
    fn brute_leaf_examples() {
        let a = brute_leaf_oracle(&class(3, &["000"]), 1);
        let t = LittlestoneTree::new(1, vec![0]).unwrap();
        assert_eq!(a.answer(&t).unwrap().to_string(), "1");

        // {000,111}, root 0, both children 1: leaves 00 (realizable by 000), 01 (not)
        let a = brute_leaf_oracle(&class(3, &["000", "111"]), 2);
        let t = LittlestoneTree::new(2, vec![0, 1, 1]).unwrap();
        let h = class(3, &["000", "111"]);
        let expected = t
            .leaves()
            .find(|l| !realizable(&h, &t.leaf_sample(l).unwrap()).unwrap())
            .unwrap();
        assert_eq!(expected.to_string(), "01");
        assert_eq!(a.answer(&t).unwrap(), expected);

        let all = FiniteClass::all_functions(2).unwrap();
        let a = brute_leaf_oracle(&all, 2);
        let faults = enumerate_trees(2, &[0, 1])
            .unwrap()
            .filter_map(|t| a.answer(&t).err())
            .collect::<Vec<_>>();
        assert!(!faults.is_empty());
        assert!(faults.iter().all(|f| f.kind == FaultKind::ContractViolation));
    }

    #[test]
    fn brute_leaf_outputs_are_never_realizable() {
        for strs in [&["000", "111"][..], &["010", "011", "110"], &["001", "010", "100", "000"]] {
            let h = class(3, strs);
            let d = crate::dimensions::ldim(&h) as usize;
            let a = brute_leaf_oracle(&h, d + 1);
            for t in enumerate_trees(d + 1, &[0, 1, 2]).unwrap() {
                let leaf = a.answer(&t).unwrap();
                audit_leaf(&h, &t, &leaf).unwrap();
            }
        }
    }

    #[test]
    fn shape_checks() {
        let a = brute_leaf_oracle(&class(3, &["000"]), 1);
        let deep = LittlestoneTree::new(2, vec![0, 0, 0]).unwrap();
        assert_eq!(a.answer(&deep).unwrap_err().kind, FaultKind::ShapeMismatch);
        let outside = LittlestoneTree::new(1, vec![7]).unwrap();
        assert_eq!(a.answer(&outside).unwrap_err().kind, FaultKind::ShapeMismatch);
    }

    #[test]
    fn brute_threshold_examples() {
        let thr = class(3, &["111", "011", "001"]);
        let w = brute_threshold_oracle(&thr, 4);
        let seq = [0, 1, 2, 2];
        let expected = (1..=4)
            .find(|&i| !realizable(&thr, &threshold_sample(&seq, i).unwrap()).unwrap())
            .unwrap();
        assert_eq!(w.answer(&seq).unwrap(), expected);
        // thresholds 1..3 need a function with f(2)=1 as the last pair: all of 111,011,001 qualify
        assert_eq!(expected, 4);

        let w = brute_threshold_oracle(&class(3, &["000"]), 1);
        assert_eq!(w.answer(&[0]).unwrap(), 1);

        let w = brute_threshold_oracle(&thr, 3);
        assert_eq!(w.answer(&[0, 1, 2]).unwrap_err().kind, FaultKind::ContractViolation);
        assert_eq!(w.answer(&[0, 1]).unwrap_err().kind, FaultKind::ShapeMismatch);
    }

    #[test]
    fn audit_reports_realizer() {
        let h = class(3, &["000", "111"]);
        let t = LittlestoneTree::new(1, vec![0]).unwrap();
        let fault = audit_leaf(&h, &t, &LeafAddress::parse("1").unwrap()).unwrap_err();
        assert_eq!(fault.witness.realized_by.unwrap().to_string(), "111");
        assert!(audit_threshold(&h, &[0, 1], 2).is_ok());
        assert!(audit_threshold(&h, &[0, 1], 1).is_err());
    }
}
