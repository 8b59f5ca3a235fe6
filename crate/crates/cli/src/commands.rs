use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use littlestone_lab::adversary::{extract_nonrealizable_leaf, force_against_function, shattered_tree_adversary, Extraction};
use littlestone_lab::config::{enum_cap, guard};
use littlestone_lab::conversions::{
    dim_bound, split_oracle, verify_leaf_to_threshold, verify_threshold_to_leaf, BoundKind,
};
use littlestone_lab::dimensions::{
    audit_leaf, brute_leaf_oracle, brute_threshold_oracle, dimension_report, enumerate_trees, ldim, ldim_clamped,
    tdim, tree_count, DimensionMethod, LeafOracle, LittlestoneTree, TreeEnumerator,
};
use littlestone_lab::fooling::{certify_ldim_le_2, fool_many, required_block_size, BlockLayout, RestrictionStream};
use littlestone_lab::hypothesis::{realizable, restrict};
use littlestone_lab::learners::{bounded_regime_learner, run_game, worst_case_mistakes, InvertedSoa, Learner};
use littlestone_lab::par::Exec;
use littlestone_lab::selftest::{self, SelftestOptions};
use littlestone_lab::{FiniteClass, Hypothesis, LabError, Point, Sample};

use crate::report::{write_atomic, Failure, Inputs};
use crate::roster;

/// What a finished command hands back to `main`.
pub struct Done {
    /// `ok`, or `fault` when a check the command ran came out negative.
    pub fault: bool,
    pub body: Value,
}

fn ok<T: Serialize>(body: T) -> Result<Done, Failure> {
    Ok(Done {
        fault: false,
        body: serde_json::to_value(body).map_err(LabError::from)?,
    })
}

fn load_class(inputs: &mut Inputs, path: &Path) -> Result<FiniteClass, Failure> {
    Ok(FiniteClass::from_json_str(&inputs.read(path)?)?)
}

const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Args, Serialize)]
pub struct DimsArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Recursive)]
    pub method: Method,
    /// Largest Littlestone dimension the tree search tries.
    #[arg(long)]
    pub max_d: Option<usize>,
    /// Longest threshold sequence searched.
    #[arg(long)]
    pub max_t: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Recursive,
    Trees,
}

pub fn dims(a: &DimsArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let h = load_class(inputs, &a.class)?;
    let n = h.domain_size();
    let method = match a.method {
        Method::Recursive => DimensionMethod::Recursive,
        Method::Trees => DimensionMethod::Trees,
    };
    ok(dimension_report(&h, method, a.max_d.unwrap_or(n), a.max_t.unwrap_or(n)))
}

#[derive(Args, Serialize)]
pub struct LearnArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: PathBuf,
    #[arg(long, default_value = "soa")]
    pub learner: String,
    /// Longest realizable sample played.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Report a fault when the learner makes more mistakes than this.
    #[arg(long)]
    pub mistake_cap: Option<usize>,
}

pub fn learn(a: &LearnArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let h = load_class(inputs, &a.class)?;
    let l = roster::learner(&a.learner, Some(&h))?;
    let w = worst_case_mistakes(&l, &h, a.max_len, a.budget, Exec::default());
    let exceeded = a.mistake_cap.is_some_and(|cap| w.mistakes > cap);
    Ok(Done {
        fault: exceeded,
        body: json!({
            "learner": l.name(),
            "ldim": ldim(&h),
            "max_len": a.max_len,
            "worst_case": w,
            "mistake_cap": a.mistake_cap,
            "within_cap": !exceeded,
        }),
    })
}

#[derive(Args, Serialize)]
pub struct GameArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub sample: PathBuf,
    #[arg(long, default_value = "soa")]
    pub learner: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

pub fn game(a: &GameArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let h = a.class.as_deref().map(|p| load_class(inputs, p)).transpose()?;
    let s: Sample = serde_json::from_str(&inputs.read(&a.sample)?).map_err(LabError::from)?;
    if let Some(h) = &h {
        s.check_domain(h.domain_size())?;
    }
    let l = roster::learner(&a.learner, h.as_ref())?;
    ok(run_game(&l, &s, a.budget))
}

#[derive(Args, Serialize)]
pub struct ForceArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: PathBuf,
    #[arg(long, default_value = "soa")]
    pub learner: String,
    /// Force along this function (a bit string); otherwise walk a shattered tree.
    #[arg(long)]
    pub function: Option<String>,
    /// Most mistakes to force along `--function`.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

pub fn force(a: &ForceArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let h = load_class(inputs, &a.class)?;
    let l = roster::learner(&a.learner, Some(&h))?;
    let r = match &a.function {
        Some(f) => {
            let f = Hypothesis::parse(f)?;
            if f.len() != h.domain_size() {
                return Err(Failure::Usage(format!(
                    "--function has {} bits, the class domain has {}",
                    f.len(),
                    h.domain_size()
                )));
            }
            force_against_function(&l, &f, a.k, a.budget)
        }
        None => shattered_tree_adversary(&h, &l, a.budget),
    };
    ok(r.report(&h)?)
}

#[derive(Args, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub tree: PathBuf,
    #[arg(long, default_value = "soa")]
    pub learner: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

pub fn extract(a: &ExtractArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let h = load_class(inputs, &a.class)?;
    let t: LittlestoneTree = serde_json::from_str(&inputs.read(&a.tree)?).map_err(LabError::from)?;
    if t.max_label() >= h.domain_size() {
        return Err(LabError::Domain {
            point: t.max_label(),
            domain_size: h.domain_size(),
        }
        .into());
    }
    let l = roster::learner(&a.learner, Some(&h))?;
    let e = extract_nonrealizable_leaf(&l, &t, a.budget);
    let leaf_realizable = match &e {
        Extraction::Leaf { sample, .. } => Some(realizable(&h, sample)?),
        Extraction::Diverged { .. } => None,
    };
    ok(json!({
        "learner": l.name(),
        "claimed_mistake_bound": t.depth() - 1,
        "extraction": e,
        "leaf_realizable": leaf_realizable,
    }))
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionArg {
    LeafToThreshold,
    ThresholdToLeaf,
}

#[derive(Args, Serialize)]
pub struct ConvertArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: PathBuf,
    #[arg(long, value_enum)]
    pub direction: DirectionArg,
    /// Use the exact extremal bound instead of the exponential one.
    #[arg(long)]
    pub exact: bool,
    /// Build the source oracle from this class instead of `--class`; the
    /// answers are still checked against `--class`.
    #[arg(long)]
    #[serde(skip)]
    pub oracle_class: Option<PathBuf>,
    /// Number of queries to the constructed oracle.
    #[arg(long, default_value_t = 8)]
    pub calls: usize,
}

/// `calls` indices spread evenly over `0..count`.
fn spread(count: u128, calls: usize) -> Vec<u128> {
    let calls = (calls as u128).min(count);
    (0..calls).map(|i| i * count / calls.max(1)).collect()
}

pub fn convert(a: &ConvertArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let truth = load_class(inputs, &a.class)?;
    let source = match &a.oracle_class {
        Some(p) => load_class(inputs, p)?,
        None => truth.clone(),
    };
    if source.domain_size() != truth.domain_size() {
        return Err(Failure::Usage("--oracle-class must have the same domain size as --class".into()));
    }
    let n = truth.domain_size();
    let alphabet: Vec<Point> = (0..n).collect();
    let cap = enum_cap()?;
    let report = match a.direction {
        DirectionArg::LeafToThreshold => {
            let d = ldim_clamped(&source);
            let bound = dim_bound(BoundKind::TOfD, d, a.exact, cap)?
                .within()
                .ok_or_else(|| guard_exceeded("exact t_d search", cap))?;
            let len = bound.value + 1;
            let count = (n as u128).checked_pow(len as u32);
            guard("threshold sequences", count, cap)?;
            let seqs: Vec<Vec<Point>> = spread(count.unwrap_or(0), a.calls)
                .into_iter()
                .map(|mut i| {
                    (0..len)
                        .map(|_| {
                            let x = (i % n as u128) as Point;
                            i /= n as u128;
                            x
                        })
                        .collect()
                })
                .collect();
            verify_leaf_to_threshold(&truth, Arc::new(brute_leaf_oracle(&source, d + 1)), bound, &seqs)?
        }
        DirectionArg::ThresholdToLeaf => {
            let t = tdim(&source, n).within().map_or(n, |w| w.tdim);
            let bound = dim_bound(BoundKind::DOfT, t, a.exact, cap)?
                .within()
                .ok_or_else(|| guard_exceeded("exact d_t search", cap))?;
            let depth = bound.value.min(n) + 1;
            let count = tree_count(depth, n);
            guard("trees", count, cap)?;
            let trees: Vec<LittlestoneTree> = spread(count.unwrap_or(0), a.calls)
                .into_iter()
                .map(|i| TreeEnumerator::nth_tree(depth, &alphabet, i))
                .collect();
            verify_threshold_to_leaf(&truth, Arc::new(brute_threshold_oracle(&source, t + 1)), bound, &trees)?
        }
    };
    Ok(Done {
        fault: !report.all_verified,
        body: serde_json::to_value(&report).map_err(LabError::from)?,
    })
}

fn guard_exceeded(what: &str, cap: u128) -> Failure {
    Failure::Lab(LabError::ResourceGuard {
        what: what.into(),
        needed: u128::MAX,
        cap,
    })
}

#[derive(Args, Serialize)]
pub struct SplitArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: PathBuf,
    #[arg(long)]
    pub point: Point,
    /// Universe of tree labels; defaults to the whole domain.
    #[arg(long, value_delimiter = ',')]
    pub universe: Option<Vec<Point>>,
}

pub fn split(a: &SplitArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let h = load_class(inputs, &a.class)?;
    let d = ldim(&h);
    if d < 1 {
        return Err(LabError::Precondition(format!("splitting needs ldim >= 1, the class has {d}")).into());
    }
    let d = d as usize;
    let universe = a.universe.clone().unwrap_or_else(|| (0..h.domain_size()).collect());
    let oracle: Arc<dyn LeafOracle> = Arc::new(brute_leaf_oracle(&h, d + 1));
    let (reduced, summary) = split_oracle(oracle, a.point, &universe)?;
    let r = restrict(&h, a.point, summary.bit)?;
    guard("reduced oracle checks", tree_count(d, universe.len()), enum_cap()?)?;
    let mut checked = 0u64;
    let mut fault = None;
    for t in enumerate_trees(d, &universe)? {
        let verdict = reduced.answer(&t).and_then(|leaf| audit_leaf(&r, &t, &leaf));
        if let Err(f) = verdict {
            fault = Some(f);
            break;
        }
        checked += 1;
    }
    let restricted = ldim(&r);
    Ok(Done {
        fault: fault.is_some() || restricted >= d as i32,
        body: json!({
            "summary": summary,
            "ldim": d,
            "restricted_ldim": restricted,
            "trees_checked": checked,
            "fault": fault,
        }),
    })
}

#[derive(Args, Serialize)]
pub struct BoundedArgs {
    #[arg(long)]
    #[serde(skip)]
    pub class: PathBuf,
    /// Largest point the learner receives.
    #[arg(long)]
    pub bound: Point,
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
    /// Defaults to the class's Littlestone dimension.
    #[arg(long)]
    pub mistake_cap: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

pub fn bounded(a: &BoundedArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let h = load_class(inputs, &a.class)?;
    let d = ldim_clamped(&h);
    let built = bounded_regime_learner(Arc::new(brute_leaf_oracle(&h, d + 1)))?.build(a.bound)?;
    let on_prefix = h.truncate((a.bound + 1).min(h.domain_size()))?;
    let w = worst_case_mistakes(&built.learner, &on_prefix, a.max_len, a.budget, Exec::default());
    let cap = a.mistake_cap.unwrap_or(d);
    Ok(Done {
        fault: w.mistakes > cap || w.divergence.is_some(),
        body: json!({
            "build": built.summary(d),
            "max_len": a.max_len,
            "mistake_cap": cap,
            "worst_case": w,
        }),
    })
}

#[derive(Args, Serialize)]
pub struct FoolArgs {
    /// Comma-separated learner names, one block each.
    #[arg(long, value_delimiter = ',', default_value = "constant-0,constant-1,majority")]
    pub learners: Vec<String>,
    #[arg(long, default_value_t = 8)]
    pub fuel: u64,
    #[arg(long, default_value_t = 5)]
    pub iterations: usize,
    /// Must equal the number of learners when given.
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Points materialized in total; split evenly between the blocks.
    #[arg(long)]
    pub prefix_size: Option<usize>,
    /// Also certify the combined class.
    #[arg(long)]
    pub certify: bool,
    /// Where to dump the restriction stream as JSON lines.
    #[arg(long)]
    #[serde(skip)]
    pub stream: Option<PathBuf>,
}

pub fn fool(a: &FoolArgs, _: &mut Inputs) -> Result<Done, Failure> {
    let m = a.learners.len();
    if a.blocks.is_some_and(|b| b != m) {
        return Err(Failure::Usage(format!("--blocks must equal the number of learners ({m})")));
    }
    let learners = a
        .learners
        .iter()
        .map(|name| roster::learner(name, None))
        .collect::<Result<Vec<_>, _>>()?;
    let per_block = match a.prefix_size {
        Some(p) if m > 0 && p % m == 0 => p / m,
        Some(p) => return Err(Failure::Usage(format!("--prefix-size {p} does not split into {m} blocks"))),
        None => required_block_size(a.fuel, a.iterations)
            .ok_or_else(|| Failure::Usage("block size overflows".into()))?,
    };
    let run = fool_many(&learners, per_block, a.fuel, a.iterations)?;
    if let Some(path) = &a.stream {
        let mut buf = Vec::new();
        run.stream.write_jsonl(&mut buf).map_err(|error| Failure::Io {
            path: path.clone(),
            error,
        })?;
        write_atomic(path, &buf)?;
    }
    let certificate = a
        .certify
        .then(|| certify_ldim_le_2(&run.stream, &run.layout))
        .transpose()?;
    let fault = !run.witness_checks.iter().all(|&c| c) || certificate.as_ref().is_some_and(|c| !c.ok);
    Ok(Done {
        fault,
        body: json!({
            "layout": run.layout,
            "prefix_size": run.layout.prefix_size(),
            "verdicts": run.verdicts,
            "states": run.states,
            "witness_checks": run.witness_checks,
            "restrictions": run.stream.len(),
            "certificate": certificate,
        }),
    })
}

#[derive(Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    #[serde(skip)]
    pub stream: PathBuf,
    #[arg(long)]
    pub blocks: usize,
    #[arg(long)]
    pub prefix_size: usize,
}

pub fn certify(a: &CertifyArgs, inputs: &mut Inputs) -> Result<Done, Failure> {
    let text = inputs.read(&a.stream)?;
    let stream = RestrictionStream::read_jsonl(text.as_bytes())?;
    if a.blocks == 0 || !a.prefix_size.is_multiple_of(a.blocks) {
        return Err(Failure::Usage(format!(
            "--prefix-size {} does not split into {} blocks",
            a.prefix_size, a.blocks
        )));
    }
    let layout = BlockLayout::new(a.blocks, a.prefix_size / a.blocks)?;
    let c = certify_ldim_le_2(&stream, &layout)?;
    Ok(Done {
        fault: !c.ok,
        body: serde_json::to_value(&c).map_err(LabError::from)?,
    })
}

#[derive(Args, Serialize)]
pub struct SelftestArgs {
    /// Seed for the random classes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Swap SOA for a learner with the decision rule flipped.
    #[arg(long)]
    pub broken_soa: bool,
    /// Run the dimension recursion without memoization.
    #[arg(long)]
    pub no_memo: bool,
}

fn inverted(h: &FiniteClass) -> littlestone_lab::Result<Box<dyn Learner>> {
    Ok(Box::new(InvertedSoa::new(h)?))
}

pub fn selftest(a: &SelftestArgs, _: &mut Inputs) -> Result<Done, Failure> {
    let mut opts = SelftestOptions {
        seed: a.seed,
        memo: !a.no_memo,
        ..SelftestOptions::default()
    };
    if a.broken_soa {
        opts.soa = inverted;
    }
    let r = selftest::run(&opts);
    let mut out = std::io::stdout().lock();
    for o in &r.outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{tag} {:>2} {} ({}, {} ms)", o.id, o.name, o.detail, o.millis);
    }
    Ok(Done {
        fault: !r.passed,
        body: serde_json::to_value(&r).map_err(LabError::from)?,
    })
}
