//! Classification of solver results against planted relations, and experiment runs.
//!
//! A found relation is Good when it is `λ·𝔞` for the planted `𝔞`, checked exactly with
//! `λ = −a₁`. Otherwise it is re-evaluated with every constant recomputed at 1000 digits:
//! Unexpected when it still vanishes there, Bad when it does not.

use std::fmt;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{BigComplex, BigReal, PrecisionContext};
use crate::pslq::{solve, SolverConfig, SolverStatus, ThresholdMode};
use crate::quadring::{embed, lattice_params, AlgebraicInt, GaussianInt, MixedInt, QuadraticRing, RingContext};
use crate::reduction::{default_inner_gamma, inner_ring, reduction_solve, ReductionOutcome, ReductionStatus};
use crate::testgen::{CoeffSize, ConstantPool, ProblemInstance, TestSet};

/// Digits of the independent re-evaluation.
pub const VERIFY_DIGITS: u32 = 1000;
/// A re-evaluated residual below `10^-VERIFY_EXPONENT` counts as zero.
pub const VERIFY_EXPONENT: i64 = 998;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Good,
    Unexpected,
    Bad,
    Fail,
}

impl Verdict {
    pub fn letter(&self) -> char {
        match self {
            Verdict::Good => 'G',
            Verdict::Unexpected => 'U',
            Verdict::Bad => 'B',
            Verdict::Fail => 'F',
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Set only on a Fail produced by a rejected reconstruction.
    pub reclassified_from: Option<Verdict>,
}

impl Classification {
    pub fn of(verdict: Verdict) -> Self {
        Classification { verdict, reclassified_from: None }
    }
}

fn neg_gaussian(g: &GaussianInt) -> GaussianInt {
    GaussianInt { re: Integer::from(-&g.re), im: Integer::from(-&g.im) }
}

/// Classifies a relation in `Z[ω]`; `None` means the solver failed.
pub fn classify(
    found: Option<&[AlgebraicInt]>,
    instance: &ProblemInstance,
    ring: QuadraticRing,
) -> Result<Classification> {
    if instance.ring() != ring {
        return Err(invalid(format!("instance lives in {}, not {ring}", instance.ring())));
    }
    let mixed: Option<Vec<MixedInt>> = found.map(|f| f.iter().map(MixedInt::from_algebraic).collect());
    classify_mixed(mixed.as_deref(), instance)
}

/// As [`classify`] for relations in `Z[i][ω]`, as reassembled by the reduction method.
pub fn classify_mixed(found: Option<&[MixedInt]>, instance: &ProblemInstance) -> Result<Classification> {
    let Some(found) = found else {
        return Ok(Classification::of(Verdict::Fail));
    };
    if found.len() != instance.planted.len() {
        return Err(invalid(format!("relation has {} entries, instance has {}", found.len(), instance.planted.len())));
    }
    if found.iter().all(MixedInt::is_zero) {
        return Err(invalid("zero vector is not a relation"));
    }
    let ring = instance.ring();
    let lambda = MixedInt::new(neg_gaussian(&found[0].c0), neg_gaussian(&found[0].c1), ring);
    let multiple = instance.planted.iter().zip(found).all(|(p, f)| &lambda * &MixedInt::from_algebraic(p) == *f);
    if multiple {
        return Ok(Classification::of(Verdict::Good));
    }
    let residual = high_precision_residual(found, instance)?;
    let ctx = PrecisionContext::new(VERIFY_DIGITS)?;
    let verdict = if residual < ctx.pow10(-VERIFY_EXPONENT) { Verdict::Unexpected } else { Verdict::Bad };
    Ok(Classification::of(verdict))
}

/// `|Σ a_i x_i|` with `x` rebuilt from the constant ids at 1000 digits.
pub fn high_precision_residual(found: &[MixedInt], instance: &ProblemInstance) -> Result<BigReal> {
    let ctx = PrecisionContext::new(VERIFY_DIGITS)?;
    let x = instance.evaluate_at(&ctx)?;
    let rc = RingContext::new(instance.ring(), ctx);
    let mut acc = BigComplex::zero(&ctx);
    for (a, v) in found.iter().zip(&x) {
        acc.add_mul(&rc.embed_mixed(a), v);
    }
    Ok(acc.abs())
}

/// A rejected reconstruction becomes Fail, remembering what it would have been.
pub fn postprocess_reduction(outcome: &ReductionOutcome, base: Classification) -> Classification {
    if outcome.status == ReductionStatus::InvalidReconstruction {
        return Classification { verdict: Verdict::Fail, reclassified_from: Some(base.verdict) };
    }
    base
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Apslq,
    Reduction,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Apslq => "apslq",
            Method::Reduction => "reduction",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "apslq" | "pslq" => Ok(Method::Apslq),
            "reduction" => Ok(Method::Reduction),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GammaChoice {
    /// `γ₁` of the solving ring: the target ring for APSLQ, `Z` or `Z[i]` for reduction.
    Gamma1,
    /// `γ₁ + 0.1` of the solving ring, or 2 where `γ₁` does not exist.
    Default,
    /// A decimal literal.
    Value(String),
}

impl fmt::Display for GammaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaChoice::Gamma1 => f.write_str("gamma1"),
            GammaChoice::Default => f.write_str("default"),
            GammaChoice::Value(v) => f.write_str(v),
        }
    }
}

impl FromStr for GammaChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "gamma1" | "γ1" | "γ₁" => Ok(GammaChoice::Gamma1),
            "default" => Ok(GammaChoice::Default),
            _ => {
                let v: f64 = t.parse().map_err(|_| Error::Parse(format!("bad gamma {t:?}")))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("gamma {t} must be positive")));
                }
                Ok(GammaChoice::Value(t.to_string()))
            }
        }
    }
}

impl Serialize for GammaChoice {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MethodConfig {
    pub method: Method,
    pub gamma: GammaChoice,
    pub threshold: ThresholdMode,
    /// `None` means `10·n·d`.
    pub max_iterations: Option<u64>,
}

impl MethodConfig {
    pub fn new(method: Method, gamma: GammaChoice) -> Self {
        MethodConfig { method, gamma, threshold: ThresholdMode::default(), max_iterations: None }
    }

    pub fn with_threshold(mut self, mode: ThresholdMode) -> Self {
        self.threshold = mode;
        self
    }

    pub fn with_max_iterations(mut self, cap: Option<u64>) -> Self {
        self.max_iterations = cap;
        self
    }

    /// The ring whose lattice the solver walks for input `x`.
    pub fn solving_ring(&self, ring: QuadraticRing, x: &[BigComplex]) -> QuadraticRing {
        match self.method {
            Method::Apslq => ring,
            Method::Reduction => inner_ring(ring, x),
        }
    }

    pub fn resolve_gamma(&self, solving: QuadraticRing, ctx: &PrecisionContext) -> Result<BigReal> {
        match &self.gamma {
            GammaChoice::Value(v) => ctx.parse_real(v),
            GammaChoice::Gamma1 => lattice_params(solving, ctx)?
                .gamma1
                .ok_or_else(|| Error::UnsupportedRing(format!("{solving} has no gamma1"))),
            GammaChoice::Default => match lattice_params(solving, ctx)?.gamma1 {
                Some(_) => default_inner_gamma(solving, ctx),
                None => Ok(ctx.from_i64(2)),
            },
        }
    }

    pub fn solver_config(&self, solving: QuadraticRing, ctx: &PrecisionContext) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.resolve_gamma(solving, ctx)?, *ctx).with_threshold(self.threshold);
        if let Some(cap) = self.max_iterations {
            cfg = cfg.with_max_iterations(cap);
        }
        Ok(cfg)
    }
}

/// One solved instance under one method configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: usize,
    pub k: usize,
    pub method: Method,
    pub gamma: String,
    pub threshold: ThresholdMode,
    pub verdict: Verdict,
    pub reclassified_from: Option<Verdict>,
    pub iterations: u64,
    pub wall_seconds: f64,
    /// Largest lower bound on relation norms seen by the solver.
    pub peak_bound: Option<f64>,
    /// Norm of the planted relation in the solver's coordinates.
    pub planted_norm: f64,
    /// `peak_bound <= planted_norm`; absent when no bound was produced.
    pub bound_holds: Option<bool>,
    pub relation: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub good: usize,
    pub unexpected: usize,
    pub bad: usize,
    pub fail: usize,
    /// Fails that were Good before a rejected reconstruction.
    pub reclassified_good: usize,
}

impl Tally {
    pub fn add(&mut self, verdict: Verdict, from: Option<Verdict>) {
        match verdict {
            Verdict::Good => self.good += 1,
            Verdict::Unexpected => self.unexpected += 1,
            Verdict::Bad => self.bad += 1,
            Verdict::Fail => self.fail += 1,
        }
        if from == Some(Verdict::Good) {
            self.reclassified_good += 1;
        }
    }

    pub fn total(&self) -> usize {
        self.good + self.unexpected + self.bad + self.fail
    }
}

/// `<n>G[<n>U][<n>B][<n>F]`, zero fields omitted; an empty tally is `0G`.
impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.total() == 0 {
            return f.write_str("0G");
        }
        for (n, c) in [(self.good, 'G'), (self.unexpected, 'U'), (self.bad, 'B'), (self.fail, 'F')] {
            if n > 0 {
                write!(f, "{n}{c}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub config: MethodConfig,
    pub counts: Tally,
    pub tally: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub d: i64,
    pub pool: ConstantPool,
    pub coeff_size: CoeffSize,
    pub precision: u32,
    pub seed: u64,
    pub count: usize,
    pub cells: Vec<Cell>,
    pub records: Vec<RunRecord>,
}

#[derive(Serialize)]
struct Summary<'a> {
    d: i64,
    pool: ConstantPool,
    coeff_size: CoeffSize,
    precision: u32,
    seed: u64,
    count: usize,
    cells: &'a [Cell],
}

impl ExperimentReport {
    pub fn cell(&self, config: &MethodConfig) -> Option<&Cell> {
        self.cells.iter().find(|c| c.config == *config)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Header and cells only.
    pub fn write_summary_json<W: Write>(&self, w: W) -> Result<()> {
        let s = Summary {
            d: self.d,
            pool: self.pool,
            coeff_size: self.coeff_size,
            precision: self.precision,
            seed: self.seed,
            count: self.count,
            cells: &self.cells,
        };
        serde_json::to_writer_pretty(w, &s)?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

fn euclid(parts: impl Iterator<Item = f64>) -> f64 {
    parts.map(|v| v * v).sum::<f64>().sqrt()
}

fn embedded_norm(a: &[AlgebraicInt], ctx: &PrecisionContext) -> f64 {
    euclid(a.iter().map(|v| embed(v, ctx).abs().to_f64()))
}

/// Norm of the doubled-vector relation `(α₁, β₁, …)` matching `a`.
fn doubled_norm(a: &[AlgebraicInt]) -> f64 {
    euclid(a.iter().flat_map(|v| [v.alpha.to_f64(), v.beta.to_f64()]))
}

/// `(a₁,a₂,…)`, the form read by [`parse_relation`].
pub fn format_relation(rel: &[impl fmt::Display]) -> String {
    let parts: Vec<String> = rel.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Reads `(a₁,a₂,…)` with entries such as `3+1*w`; parentheses are optional.
pub fn parse_relation(s: &str, ring: QuadraticRing) -> Result<Vec<AlgebraicInt>> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|u| u.strip_suffix(')')).unwrap_or(t);
    if t.trim().is_empty() {
        return Err(Error::Parse("empty relation".into()));
    }
    t.split(',').map(|e| AlgebraicInt::parse(e, ring)).collect()
}

struct Solved {
    class: Classification,
    iterations: u64,
    peak_bound: Option<f64>,
    relation: Option<String>,
    note: Option<String>,
}

fn run_apslq(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<Solved> {
    let ring = inst.ring();
    let out = solve(&inst.x, ring, cfg)?;
    let rel = out.relation.as_deref().filter(|_| out.status == SolverStatus::Relation);
    Ok(Solved {
        class: classify(rel, inst, ring)?,
        iterations: out.iterations_used,
        peak_bound: Some(out.peak_bound.to_f64()),
        relation: rel.map(format_relation),
        note: out.note,
    })
}

fn run_reduction(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<Solved> {
    let ring = inst.ring();
    let mut out = reduction_solve(&inst.x, ring, cfg)?;
    let base = match out.status {
        ReductionStatus::Relation => classify(out.relation.as_deref(), inst, ring)?,
        ReductionStatus::InvalidReconstruction => classify_mixed(out.reconstructed.as_deref(), inst)?,
        ReductionStatus::Fail => Classification::of(Verdict::Fail),
    };
    let class = postprocess_reduction(&out, base);
    if class != base {
        out.original_diagnosis = Some(base);
    }
    let inner = out.inner.as_ref();
    Ok(Solved {
        class,
        iterations: inner.map_or(0, |o| o.iterations_used),
        peak_bound: inner.map(|o| o.peak_bound.to_f64()),
        relation: out.reconstructed.as_deref().map(format_relation),
        note: inner.and_then(|o| o.note.clone()),
    })
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Solves and classifies one instance; errors and panics become Fail records.
pub fn run_instance(index: usize, inst: &ProblemInstance, config: &MethodConfig, ctx: &PrecisionContext) -> RunRecord {
    let start = Instant::now();
    let solving = config.solving_ring(inst.ring(), &inst.x);
    let planted_norm = match config.method {
        Method::Apslq => embedded_norm(&inst.planted, ctx),
        Method::Reduction => doubled_norm(&inst.planted),
    };
    let attempt = catch_unwind(AssertUnwindSafe(|| {
        let cfg = config.solver_config(solving, ctx)?;
        match config.method {
            Method::Apslq => run_apslq(inst, &cfg),
            Method::Reduction => run_reduction(inst, &cfg),
        }
    }));
    let solved = match attempt {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => failed(format!("error: {e}")),
        Err(p) => failed(format!("panic: {}", panic_message(p.as_ref()))),
    };
    // Slack for the f64 conversions when a relation is found at its own norm.
    let bound_holds = solved.peak_bound.map(|b| b <= planted_norm * (1.0 + 1e-9));
    RunRecord {
        instance: index,
        k: inst.k,
        method: config.method,
        gamma: config.gamma.to_string(),
        threshold: config.threshold,
        verdict: solved.class.verdict,
        reclassified_from: solved.class.reclassified_from,
        iterations: solved.iterations,
        wall_seconds: start.elapsed().as_secs_f64(),
        peak_bound: solved.peak_bound,
        planted_norm,
        bound_holds,
        relation: solved.relation,
        note: solved.note,
    }
}

fn failed(note: String) -> Solved {
    Solved {
        class: Classification::of(Verdict::Fail),
        iterations: 0,
        peak_bound: None,
        relation: None,
        note: Some(note),
    }
}

/// Runs every instance under every configuration on all available cores.
pub fn run_experiment(set: &TestSet, methods: &[MethodConfig]) -> ExperimentReport {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let order: Vec<usize> = (0..set.instances.len()).collect();
    run_experiment_in_order(set, methods, &order, threads)
}

/// As [`run_experiment`], taking instances in `order` on `threads` workers.
pub fn run_experiment_in_order(
    set: &TestSet,
    methods: &[MethodConfig],
    order: &[usize],
    threads: usize,
) -> ExperimentReport {
    let jobs: Vec<(usize, usize)> =
        methods.iter().enumerate().flat_map(|(m, _)| order.iter().map(move |&i| (m, i))).collect();
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(jobs.len()));
    let ctx = set.spec.precision;
    let work = || loop {
        let j = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(m, i)) = jobs.get(j) else { break };
        let rec = run_instance(i, &set.instances[i], &methods[m], &ctx);
        done.lock().expect("result list poisoned").push((m, rec));
    };
    std::thread::scope(|s| {
        for _ in 1..threads.max(1) {
            s.spawn(work);
        }
        work();
    });
    let mut done = done.into_inner().expect("result list poisoned");
    done.sort_by_key(|(m, r)| (*m, r.instance));
    let mut cells: Vec<Cell> =
        methods.iter().map(|c| Cell { config: c.clone(), counts: Tally::default(), tally: String::new() }).collect();
    for (m, r) in &done {
        cells[*m].counts.add(r.verdict, r.reclassified_from);
    }
    for c in &mut cells {
        c.tally = c.counts.to_string();
    }
    ExperimentReport {
        d: set.spec.ring.id(),
        pool: set.spec.pool,
        coeff_size: set.spec.coeff_size,
        precision: ctx.decimal_digits(),
        seed: set.spec.seed,
        count: set.instances.len(),
        cells,
        records: done.into_iter().map(|(_, r)| r).collect(),
    }
}
