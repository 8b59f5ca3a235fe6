use serde::Serialize;

use crate::bits::Subset;
use crate::dimensions::Budgeted;
use crate::error::{LabError, Result};
use crate::hypothesis::{FiniteClass, Point, Sample};

/// The `i`-th threshold on `seq` (1-based): `(x_1,0)..(x_{i-1},0)(x_i,1)..(x_t,1)`.
pub fn threshold_sample(seq: &[Point], i: usize) -> Result<Sample> {
    if i == 0 || i > seq.len() {
        return Err(LabError::Structural(format!(
            "threshold index {i} outside 1..={}",
            seq.len()
        )));
    }
    Ok(Sample::from_pairs(
        seq.iter().enumerate().map(|(j, &x)| (x, j + 1 >= i)),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdWitness {
    pub tdim: usize,
    /// A sequence of distinct points all of whose thresholds are realizable.
    pub sequence: Vec<Point>,
}

/// Threshold dimension, searched over sequences of distinct points.
///
/// Repeated points never help: with `x_j = x_k` for `j < k`, every threshold
/// `i` in `j < i <= k` contains both `(x_j, 0)` and `(x_k, 1)`.
///
/// Returns `Exceeded` only when a fully realizable sequence of length
/// `max_t + 1` exists, so a `Within` answer is always exact.
pub fn tdim(h: &FiniteClass, max_t: usize) -> Budgeted<ThresholdWitness> {
    let limit = (max_t + 1).min(h.domain_size());
    let mut search = Search {
        h,
        limit,
        used: Vec::new(),
        best: Vec::new(),
    };
    search.extend(&[], &h.full_subset());
    if search.best.len() > max_t {
        Budgeted::Exceeded
    } else {
        Budgeted::Within(ThresholdWitness {
            tdim: search.best.len(),
            sequence: search.best,
        })
    }
}

struct Search<'a> {
    h: &'a FiniteClass,
    limit: usize,
    used: Vec<Point>,
    best: Vec<Point>,
}

impl Search<'_> {
    /// `partials[i]` holds the hypotheses consistent with the restriction of
    /// threshold `i + 1` to the current prefix; `zeros` those that are 0 on
    /// the whole prefix (needed by every threshold starting later).
    fn extend(&mut self, partials: &[Subset], zeros: &Subset) {
        if self.used.len() > self.best.len() {
            self.best = self.used.clone();
        }
        if self.used.len() >= self.limit || zeros.is_empty() {
            return;
        }
        for x in 0..self.h.domain_size() {
            if self.best.len() >= self.limit {
                return;
            }
            if self.used.contains(&x) {
                continue;
            }
            let one = self.h.column(x, true);
            let mut next: Vec<Subset> = Vec::with_capacity(partials.len() + 1);
            let mut ok = true;
            for p in partials.iter().chain(std::iter::once(zeros)) {
                let q = p.and(one);
                if q.is_empty() {
                    ok = false;
                    break;
                }
                next.push(q);
            }
            if !ok {
                continue;
            }
            let next_zeros = zeros.and(self.h.column(x, false));
            self.used.push(x);
            self.extend(&next, &next_zeros);
            self.used.pop();
        }
    }
}
