use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::config;
use crate::conversions::induced::{leaf_oracle_samples, InducedFiniteClass};
use crate::dimensions::{
    audit_leaf, audit_threshold, check_sequence_shape, check_tree_shape, threshold_sample, tree_count,
    LeafAddress, LeafOracle, LittlestoneTree, ThresholdOracle,
};
use crate::error::{FaultKind, LabError, OracleFault, Result};
use crate::hypothesis::{FiniteClass, Point, Sample};
use crate::par::{self, Exec};

/// Work counters of a constructed oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConversionStats {
    pub calls: u64,
    pub trees_enumerated: u64,
    pub sequences_enumerated: u64,
}

#[derive(Default)]
struct Counters {
    calls: AtomicU64,
    trees: AtomicU64,
    sequences: AtomicU64,
}

impl Counters {
    fn snapshot(&self) -> ConversionStats {
        ConversionStats {
            calls: self.calls.load(Ordering::Relaxed),
            trees_enumerated: self.trees.load(Ordering::Relaxed),
            sequences_enumerated: self.sequences.load(Ordering::Relaxed),
        }
    }
}

type Memo = Mutex<HashMap<Vec<Point>, Arc<InducedFiniteClass>>>;

fn lab_to_fault(e: LabError) -> OracleFault {
    match e {
        LabError::Oracle(f) => *f,
        other => OracleFault::new(FaultKind::ShapeMismatch, other.to_string()),
    }
}

/// A threshold oracle built from a leaf oracle of depth `d + 1`.
///
/// On a sequence it runs the leaf oracle on every depth-`(d+1)` tree labeled
/// by the sequence's points, keeps the functions on those points avoiding
/// every indicated leaf sample, and returns the first threshold none of them
/// realizes. That class has dimension at most `d`, so its threshold dimension
/// is at most `t_d`, and an arity above `t_d` guarantees an answer.
///
/// The induced class depends only on the set of points, and the leaf oracle
/// is deterministic, so it is computed once per point set.
pub struct LeafToThreshold {
    a: Arc<dyn LeafOracle>,
    domain_size: usize,
    arity: usize,
    audit: Option<Arc<FiniteClass>>,
    exec: Exec,
    cap: u128,
    memo: Memo,
    counters: Counters,
}

/// `t_bound + 1` is the arity of the result.
pub fn leaf_to_threshold_oracle(a: Arc<dyn LeafOracle>, domain_size: usize, t_bound: usize) -> Result<LeafToThreshold> {
    let arity = t_bound
        .checked_add(1)
        .ok_or_else(|| LabError::Precondition("threshold bound overflows".into()))?;
    let cap = config::enum_cap()?;
    let widest = arity.min(domain_size);
    config::guard(
        "enumerating trees per threshold query",
        tree_count(a.depth(), widest),
        cap,
    )?;
    Ok(LeafToThreshold {
        a,
        domain_size,
        arity,
        audit: None,
        exec: Exec::default(),
        cap,
        memo: Mutex::default(),
        counters: Counters::default(),
    })
}

impl LeafToThreshold {
    /// Checks every leaf the source oracle returns against `h`.
    pub fn with_audit(mut self, h: &FiniteClass) -> Self {
        self.audit = Some(Arc::new(h.clone()));
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn stats(&self) -> ConversionStats {
        self.counters.snapshot()
    }

    fn induced(&self, points: Vec<Point>) -> Result<Arc<InducedFiniteClass>> {
        if let Some(c) = self.memo.lock().expect("memo lock").get(&points) {
            return Ok(c.clone());
        }
        let audited;
        let source: &dyn LeafOracle = match &self.audit {
            Some(h) => {
                audited = Audited {
                    inner: self.a.clone(),
                    class: h.clone(),
                };
                &audited
            }
            None => &*self.a,
        };
        let (samples, count) = leaf_oracle_samples(source, &points, self.cap, self.exec)?;
        self.counters.trees.fetch_add(count as u64, Ordering::Relaxed);
        let c = Arc::new(InducedFiniteClass::new(&points, samples)?);
        self.memo.lock().expect("memo lock").insert(points, c.clone());
        Ok(c)
    }
}

struct Audited {
    inner: Arc<dyn LeafOracle>,
    class: Arc<FiniteClass>,
}

impl LeafOracle for Audited {
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault> {
        let leaf = self.inner.answer(tree)?;
        audit_leaf(&self.class, tree, &leaf)?;
        Ok(leaf)
    }
}

impl ThresholdOracle for LeafToThreshold {
    fn arity(&self) -> usize {
        self.arity
    }

    fn answer(&self, seq: &[Point]) -> Result<usize, OracleFault> {
        check_sequence_shape(seq, self.arity, Some(self.domain_size))?;
        self.counters.calls.fetch_add(1, Ordering::Relaxed);
        let mut points = seq.to_vec();
        points.sort_unstable();
        points.dedup();
        let hat = self.induced(points).map_err(|e| lab_to_fault(e).with_sequence(seq))?;
        for i in 1..=self.arity {
            let s = threshold_sample(seq, i).expect("index in range");
            if !hat.realizes(&s).expect("points of the sequence") {
                return Ok(i);
            }
        }
        Err(OracleFault::new(
            FaultKind::BoundFault,
            format!(
                "all {} thresholds are realized by the induced class of {} functions; the threshold bound is too small",
                self.arity,
                hat.len()
            ),
        )
        .with_sequence(seq))
    }
}

/// A leaf oracle of depth `d_bound + 1` built from a threshold oracle of
/// arity `t + 1`.
///
/// On a tree it runs the threshold oracle on every sequence (repeats allowed)
/// over the tree's labels, keeps the functions on those labels avoiding every
/// indicated threshold sample, and returns the first leaf none of them
/// realizes. That class has threshold dimension at most `t`, hence dimension
/// at most `d_t`; it also lives on `|labels|` points, so its dimension is at
/// most the number of labels as well.
pub struct ThresholdToLeaf {
    w: Arc<dyn ThresholdOracle>,
    domain_size: usize,
    depth: usize,
    audit: Option<Arc<FiniteClass>>,
    exec: Exec,
    cap: u128,
    memo: Memo,
    counters: Counters,
}

/// `d_bound + 1` is the depth of the result.
pub fn threshold_to_leaf_oracle(w: Arc<dyn ThresholdOracle>, domain_size: usize, d_bound: usize) -> Result<ThresholdToLeaf> {
    let depth = d_bound + 1;
    if depth > crate::dimensions::MAX_TREE_DEPTH {
        return Err(LabError::ResourceGuard {
            what: "leaf oracle depth".into(),
            needed: depth as u128,
            cap: crate::dimensions::MAX_TREE_DEPTH as u128,
        });
    }
    let cap = config::enum_cap()?;
    let widest = domain_size.min((1usize << depth) - 1) as u128;
    config::guard(
        "enumerating sequences per leaf query",
        u32::try_from(w.arity()).ok().and_then(|a| widest.checked_pow(a)),
        cap,
    )?;
    Ok(ThresholdToLeaf {
        w,
        domain_size,
        depth,
        audit: None,
        exec: Exec::default(),
        cap,
        memo: Mutex::default(),
        counters: Counters::default(),
    })
}

impl ThresholdToLeaf {
    /// Checks every threshold the source oracle returns against `h`.
    pub fn with_audit(mut self, h: &FiniteClass) -> Self {
        self.audit = Some(Arc::new(h.clone()));
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn stats(&self) -> ConversionStats {
        self.counters.snapshot()
    }

    fn induced(&self, points: Vec<Point>) -> Result<Arc<InducedFiniteClass>> {
        if let Some(c) = self.memo.lock().expect("memo lock").get(&points) {
            return Ok(c.clone());
        }
        let arity = self.w.arity();
        let count = config::guard(
            "enumerating sequences per leaf query",
            u32::try_from(arity).ok().and_then(|a| (points.len() as u128).checked_pow(a)),
            self.cap,
        )?;
        let base = points.len() as u128;
        let samples = par::try_map_range(self.exec, count as usize, |idx| -> Result<Sample, OracleFault> {
            let mut seq = vec![0; arity];
            let mut rest = idx as u128;
            for slot in seq.iter_mut().rev() {
                *slot = points[(rest % base) as usize];
                rest /= base;
            }
            let i = self.w.answer(&seq)?;
            let s = threshold_sample(&seq, i).map_err(|e| {
                OracleFault::new(FaultKind::ShapeMismatch, e.to_string())
                    .with_sequence(&seq)
                    .with_answer(i)
            })?;
            if let Some(h) = &self.audit {
                audit_threshold(h, &seq, i)?;
            }
            Ok(s)
        })?;
        self.counters.sequences.fetch_add(count as u64, Ordering::Relaxed);
        let c = Arc::new(InducedFiniteClass::new(&points, samples)?);
        self.memo.lock().expect("memo lock").insert(points, c.clone());
        Ok(c)
    }
}

impl LeafOracle for ThresholdToLeaf {
    fn depth(&self) -> usize {
        self.depth
    }

    fn answer(&self, tree: &LittlestoneTree) -> Result<LeafAddress, OracleFault> {
        check_tree_shape(tree, self.depth, Some(self.domain_size))?;
        self.counters.calls.fetch_add(1, Ordering::Relaxed);
        let hat = self.induced(tree.label_set()).map_err(|e| lab_to_fault(e).with_tree(tree))?;
        tree.leaves()
            .find(|leaf| !hat.realizes(&tree.path_sample(leaf.bits())).expect("labels of the tree"))
            .ok_or_else(|| {
                OracleFault::new(
                    FaultKind::BoundFault,
                    format!(
                        "every leaf is realized by the induced class of {} functions; the dimension bound is too small",
                        hat.len()
                    ),
                )
                .with_tree(tree)
            })
    }
}
