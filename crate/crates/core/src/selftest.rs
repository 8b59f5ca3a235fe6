//! The acceptance properties at reduced scale, runnable from the CLI.
//!
//! The SOA used by the mistake-bound checks comes from a factory so a
//! deliberately broken learner can be plugged in as a negative control.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::adversary::{extract_nonrealizable_leaf, shattered_tree_adversary, Extraction};
use crate::conversions::{
    dim_bound, split_oracle, verify_leaf_to_threshold, verify_threshold_to_leaf, BoundKind,
};
use crate::dimensions::{
    audit_leaf, brute_leaf_oracle, brute_threshold_oracle, ldim_by_trees, tdim, LdimSolver, LeafOracle,
    TreeEnumerator,
};
use crate::error::Result;
use crate::fooling::{certify_ldim_le_2, cylinder_in_union, fool_many, fool_single, FoolingVerdict};
use crate::gen;
use crate::hypothesis::{realizable, restrict, Cylinder, FiniteClass, Hypothesis, Point, Sample};
use crate::learners::{
    bounded_regime_learner, eldim1_learner, soa, worst_case_mistakes, ConstantLearner, Learner, LoopingLearner,
    MajorityLearner, SeededLearner,
};
use crate::par::Exec;

pub type SoaFactory = fn(&FiniteClass) -> Result<Box<dyn Learner>>;

fn standard_soa(h: &FiniteClass) -> Result<Box<dyn Learner>> {
    Ok(Box::new(soa(h)?))
}

#[derive(Clone, Copy)]
pub struct SelftestOptions {
    pub seed: u64,
    pub soa: SoaFactory,
    /// Memoize the dimension recursion. Results must not depend on it.
    pub memo: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: 0,
            soa: standard_soa,
            memo: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub memo: bool,
    pub outcomes: Vec<CriterionOutcome>,
    pub passed: bool,
}

const BUDGET: u64 = 1_000_000;

type Check = fn(&SelftestOptions, &mut gen::ClassRng) -> Result<std::result::Result<String, String>>;

pub fn run(opts: &SelftestOptions) -> SelftestReport {
    let checks: [(u8, &'static str, Check); 10] = [
        (1, "dimension oracle equivalence", dims_agree),
        (2, "threshold/Littlestone inequalities", log_inequalities),
        (3, "SOA mistake bound and adversary", soa_bounds),
        (4, "non-realizable leaf extraction", extraction),
        (5, "leaf/threshold conversions", conversions),
        (6, "splitting a leaf oracle", splitting),
        (7, "bounded-regime learner", bounded),
        (8, "fooling simulation", fooling),
        (9, "cylinder cover", cylinder_cover),
        (10, "dimension-1 learner", eldim1),
    ];
    let mut rng = gen::rng(opts.seed);
    let outcomes: Vec<CriterionOutcome> = checks
        .iter()
        .map(|&(id, name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(opts, &mut rng) {
                Ok(Ok(d)) => (true, d),
                Ok(Err(d)) => (false, d),
                Err(e) => (false, format!("error: {e}")),
            };
            CriterionOutcome {
                id,
                name,
                passed,
                detail,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect();
    SelftestReport {
        seed: opts.seed,
        memo: opts.memo,
        passed: outcomes.iter().all(|o| o.passed),
        outcomes,
    }
}

fn dim(opts: &SelftestOptions, h: &FiniteClass) -> i32 {
    let class = Arc::new(h.clone());
    if opts.memo {
        LdimSolver::new(class).ldim()
    } else {
        LdimSolver::without_memo(class).ldim()
    }
}

type Verdict = Result<std::result::Result<String, String>>;

fn pass(detail: String) -> Verdict {
    Ok(Ok(detail))
}

fn fail(detail: String) -> Verdict {
    Ok(Err(detail))
}

fn random_class(rng: &mut gen::ClassRng, max_domain: usize, max_size: usize) -> Result<FiniteClass> {
    let n = rng.gen_range(1..=max_domain);
    gen::random_class(rng, n, max_size)
}

fn dims_agree(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    let mut classes = Vec::new();
    for n in 1..=2usize {
        let all = 1u64 << n;
        for subset in 0..1u64 << all {
            let funcs = (0..all)
                .filter(|m| subset >> m & 1 == 1)
                .map(|m| Hypothesis::from_mask(n, m));
            classes.push(FiniteClass::new(n, funcs)?);
        }
    }
    for _ in 0..40 {
        classes.push(gen::random_class(rng, 3, 8)?);
    }
    for h in &classes {
        let by_trees = ldim_by_trees(h, h.domain_size(), Exec::default()).within();
        if by_trees != Some(dim(opts, h).max(0) as usize) {
            return fail(format!("ldim disagrees with the tree search on {h}"));
        }
    }
    pass(format!("{} classes", classes.len()))
}

fn log_inequalities(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..150 {
        let h = random_class(rng, 5, 32)?;
        let d = dim(opts, &h);
        let Some(t) = tdim(&h, h.domain_size()).within().map(|w| w.tdim) else {
            return fail(format!("tdim search exceeded on {h}"));
        };
        if d >= 1 && d.ilog2() as usize > t {
            return fail(format!("floor(log2 {d}) > tdim {t} on {h}"));
        }
        if t >= 1 && t.ilog2() as i32 > d {
            return fail(format!("floor(log2 {t}) > ldim {d} on {h}"));
        }
    }
    pass("150 classes".into())
}

fn soa_bounds(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..30 {
        let h = random_class(rng, 3, 8)?;
        let d = dim(opts, &h).max(0) as usize;
        let l = (opts.soa)(&h)?;
        let w = worst_case_mistakes(&l, &h, 4, BUDGET, Exec::default());
        if w.mistakes > d {
            return fail(format!("{} made {} > {d} mistakes on {h} along {}", l.name(), w.mistakes, w.witness));
        }
        let rivals: [Box<dyn Learner>; 4] = [
            l,
            Box::new(ConstantLearner::new(false)),
            Box::new(MajorityLearner),
            Box::new(SeededLearner::new(opts.seed)),
        ];
        for r in &rivals {
            let forced = shattered_tree_adversary(&h, r, BUDGET);
            if forced.mistakes_forced < d || !realizable(&h, &forced.sample)? {
                return fail(format!("adversary forced {} < {d} on {} for {h}", forced.mistakes_forced, r.name()));
            }
        }
    }
    pass("30 classes".into())
}

fn extraction(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..40 {
        let h = random_class(rng, 4, 10)?;
        let d = dim(opts, &h).max(0) as usize;
        let alphabet: Vec<Point> = (0..h.domain_size()).collect();
        let depth = d + 1;
        let count = (alphabet.len() as u128).pow((1u32 << depth) - 1);
        let t = TreeEnumerator::nth_tree(depth, &alphabet, rng.gen_range(0..count));
        match extract_nonrealizable_leaf(&(opts.soa)(&h)?, &t, BUDGET) {
            Extraction::Leaf { sample, .. } if !realizable(&h, &sample)? => {}
            other => return fail(format!("extraction on {h} gave {other:?}")),
        }
    }
    pass("40 pairs".into())
}

fn conversions(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..6 {
        let h = gen::random_class_with_ldim(rng, 3, 6, 0..=1, 1000)?;
        let d = dim(opts, &h).max(0) as usize;
        let n = h.domain_size();
        let t_bound = dim_bound(BoundKind::TOfD, d, false, 0)?.within().expect("bound mode");
        let seqs: Vec<Vec<Point>> = (0..4)
            .map(|_| (0..=t_bound.value).map(|_| rng.gen_range(0..n)).collect())
            .collect();
        let r = verify_leaf_to_threshold(&h, Arc::new(brute_leaf_oracle(&h, d + 1)), t_bound, &seqs)?;
        if !r.all_verified {
            return fail(format!("leaf to threshold fault on {h}: {:?}", r.first_fault()));
        }
        let t = tdim(&h, n).within().map_or(0, |w| w.tdim);
        let d_bound = dim_bound(BoundKind::DOfT, t, false, 0)?.within().expect("bound mode");
        let depth = d_bound.value.min(n) + 1;
        let alphabet: Vec<Point> = (0..n).collect();
        let trees: Vec<_> = (0..3)
            .map(|_| {
                let count = crate::dimensions::tree_count(depth, n).unwrap_or(u128::MAX);
                TreeEnumerator::nth_tree(depth, &alphabet, rng.gen_range(0..count))
            })
            .collect();
        let r = verify_threshold_to_leaf(&h, Arc::new(brute_threshold_oracle(&h, t + 1)), d_bound, &trees)?;
        if !r.all_verified {
            return fail(format!("threshold to leaf fault on {h}: {:?}", r.first_fault()));
        }
    }
    pass("6 classes".into())
}

fn splitting(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..5 {
        let h = gen::random_class_with_ldim(rng, 3, 6, 1..=1, 1000)?;
        let d = dim(opts, &h) as usize;
        let universe: Vec<Point> = (0..h.domain_size()).collect();
        for &x in &universe {
            let a: Arc<dyn LeafOracle> = Arc::new(brute_leaf_oracle(&h, d + 1));
            let (reduced, summary) = split_oracle(a, x, &universe)?;
            let r = restrict(&h, x, summary.bit)?;
            if dim(opts, &r) >= d as i32 {
                return fail(format!("split of {h} at {x} kept dimension"));
            }
            for t in crate::dimensions::enumerate_trees(d, &universe)? {
                let leaf = reduced.answer(&t)?;
                if let Err(f) = audit_leaf(&r, &t, &leaf) {
                    return fail(format!("reduced oracle fault: {f}"));
                }
            }
        }
    }
    pass("5 classes".into())
}

fn bounded(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..5 {
        let h = gen::random_class_with_ldim(rng, 3, 6, 0..=1, 1000)?;
        let d = dim(opts, &h).max(0) as usize;
        let n_bound = h.domain_size() - 1;
        let built = bounded_regime_learner(Arc::new(brute_leaf_oracle(&h, d + 1)))?.build(n_bound)?;
        let w = worst_case_mistakes(&built.learner, &h, 4, BUDGET, Exec::default());
        if w.mistakes > d || w.divergence.is_some() {
            return fail(format!("bounded learner made {} > {d} mistakes on {h}", w.mistakes));
        }
    }
    pass("5 classes".into())
}

fn fooling(_: &SelftestOptions, _: &mut gen::ClassRng) -> Verdict {
    let block: Vec<Point> = (0..26).collect();
    let forced: [Box<dyn Learner>; 3] = [
        Box::new(ConstantLearner::new(false)),
        Box::new(ConstantLearner::new(true)),
        Box::new(MajorityLearner),
    ];
    for l in &forced {
        let run = fool_single(l, &block, 5, 5)?;
        let ok = match &run.verdict {
            FoolingVerdict::ForcedMistakes { count, transcript, witness, .. } => {
                *count == 5 && transcript.mistakes == 5 && run.stream.admits(witness)
            }
            _ => false,
        };
        if !ok || !run.state.realizability_checks.iter().all(|&c| c) {
            return fail(format!("{} was not forced 5 times", l.name()));
        }
    }
    let run = fool_single(&LoopingLearner, &block, 5, 5)?;
    match &run.verdict {
        FoolingVerdict::DivergedOnRealizable { witnesses, sample, .. }
            if witnesses.iter().all(|w| run.stream.admits(w) && w.agrees(sample)) => {}
        other => return fail(format!("looping learner gave {other:?}")),
    }
    let many = fool_many(&forced, 20, 3, 5)?;
    if !many.witness_checks.iter().all(|&c| c) {
        return fail("a witness left the combined class".into());
    }
    let cert = certify_ldim_le_2(&many.stream, &many.layout)?;
    if !cert.ok {
        return fail(format!("certificate failed: {:?}", cert.violations));
    }
    pass(format!("prefix {} ldim {}", cert.prefix_size, cert.ldim))
}

/// Counts the functions on the support that are in `c` but in none of
/// `forbidden`, by inclusion-exclusion over the forbidden cylinders.
fn uncovered_by_counting(c: &Sample, forbidden: &[Sample], support: usize) -> i128 {
    let merge = |a: &[(Point, bool)], b: &[(Point, bool)]| -> Option<Vec<(Point, bool)>> {
        let mut out = a.to_vec();
        for &(x, v) in b {
            match out.iter().find(|&&(y, _)| y == x) {
                Some(&(_, w)) if w != v => return None,
                Some(_) => {}
                None => out.push((x, v)),
            }
        }
        Some(out)
    };
    let Some(base) = merge(&[], c.pairs()) else { return 0 };
    let mut total: i128 = 0;
    for mask in 0u32..1 << forbidden.len() {
        let mut acc = Some(base.clone());
        for (i, f) in forbidden.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = acc.and_then(|a| merge(&a, f.pairs()));
            }
        }
        if let Some(a) = acc {
            let size = 1i128 << (support - a.len());
            total += if mask.count_ones() % 2 == 0 { size } else { -size };
        }
    }
    total
}

fn random_sample(rng: &mut gen::ClassRng, support: usize, max_len: usize) -> Sample {
    let len = rng.gen_range(0..=max_len);
    Sample::from_pairs((0..len).map(|_| (rng.gen_range(0..support), rng.gen())))
}

fn cylinder_cover(_: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..200 {
        let support = rng.gen_range(1..=8);
        let c = random_sample(rng, support, 3);
        let forbidden: Vec<Sample> = (0..rng.gen_range(0..=8)).map(|_| random_sample(rng, support, 3)).collect();
        let cyls: Vec<Cylinder> = forbidden.iter().cloned().map(Cylinder::new).collect();
        let fast = cylinder_in_union(&Cylinder::new(c.clone()), &cyls)?;
        let slow = uncovered_by_counting(&c, &forbidden, support) == 0;
        if fast != slow {
            return fail(format!("disagreement on {c} against {forbidden:?}"));
        }
    }
    pass("200 instances".into())
}

fn eldim1(opts: &SelftestOptions, rng: &mut gen::ClassRng) -> Verdict {
    for _ in 0..20 {
        let h = gen::random_class_with_ldim(rng, 3, 6, 0..=1, 1000)?;
        let l = eldim1_learner(&h)?;
        let w = worst_case_mistakes(&l, &h, 5, BUDGET, Exec::default());
        if w.mistakes > 1 || w.divergence.is_some() {
            return fail(format!("eldim1 made {} mistakes on {h}", w.mistakes));
        }
        let _ = opts;
    }
    pass("20 classes".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::InvertedSoa;

    #[test]
    fn counting_oracle_examples() {
        let s = |p: &[(Point, bool)]| Sample::from_pairs(p.iter().copied());
        assert_eq!(uncovered_by_counting(&s(&[(0, false)]), &[s(&[(0, false), (1, false)])], 2), 1);
        assert_eq!(
            uncovered_by_counting(&s(&[(0, false)]), &[s(&[(0, false), (1, false)]), s(&[(0, false), (1, true)])], 2),
            0
        );
        assert_eq!(uncovered_by_counting(&s(&[(1, true), (1, false)]), &[], 2), 0);
    }

    #[test]
    fn clean_run_passes() {
        let r = run(&SelftestOptions::default());
        for o in &r.outcomes {
            assert!(o.passed, "criterion {} failed: {}", o.id, o.detail);
        }
    }

    #[test]
    fn broken_soa_is_flagged() {
        fn broken(h: &FiniteClass) -> Result<Box<dyn Learner>> {
            Ok(Box::new(InvertedSoa::new(h)?))
        }
        let mut rng = gen::rng(0);
        let opts = SelftestOptions {
            soa: broken,
            ..SelftestOptions::default()
        };
        assert!(soa_bounds(&opts, &mut rng).unwrap().is_err());
    }
}
