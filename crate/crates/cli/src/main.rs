//! `apslq`: generate test sets, solve single vectors, run experiments, verify relations.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use apslq::pslq::{residual, solve_traced};
use apslq::quadring::RingContext;
use apslq::{
    format_relation, generate_test_set, parse_relation, reduction_solve, run_experiment, BigComplex, CoeffSize,
    ConstantPool, GammaChoice, Method, MethodConfig, PrecisionContext, QuadraticRing, ReductionStatus, SolverStatus,
    TestSet, TestSetSpec, ThresholdMode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "apslq", version, about = "Integer relations over quadratic rings of integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded test set of planted relations.
    Generate(GenerateArgs),
    /// Find a relation for one vector read from a file or stdin.
    Solve(SolveArgs),
    /// Solve every instance of a test set under each method configuration.
    Experiment(ExperimentArgs),
    /// Print the residual of a relation against a vector.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Ring `Q(sqrt(d))`; 0 selects `Q`.
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long, value_parser = parse_with::<ConstantPool>)]
    pool: ConstantPool,
    #[arg(long, value_parser = parse_with::<CoeffSize>)]
    size: CoeffSize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Decimal digits; defaults to 75 (small) or 175 (large).
    #[arg(long)]
    precision: Option<u32>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    /// `gamma1`, `default`, or a decimal.
    #[arg(long, default_value = "default", value_parser = parse_with::<GammaChoice>)]
    gamma: GammaChoice,
    #[arg(long, default_value = "d-1", value_parser = parse_with::<ThresholdMode>)]
    threshold: ThresholdMode,
    /// Iteration cap; defaults to 10·n·precision.
    #[arg(long)]
    max_iter: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long, default_value = "apslq", value_parser = parse_with::<Method>)]
    method: Method,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 50)]
    precision: u32,
    /// Whitespace or comma separated entries such as `1.5-2*I`; stdin when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write one JSON line per iteration here (apslq only).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    set: PathBuf,
    /// Repeat to run several methods.
    #[arg(long, default_value = "apslq", value_parser = parse_with::<Method>)]
    method: Vec<Method>,
    /// Repeat to run several values; every method runs with every value.
    #[arg(long, default_value = "default", value_parser = parse_with::<GammaChoice>)]
    gamma: Vec<GammaChoice>,
    #[arg(long, default_value = "d-1", value_parser = parse_with::<ThresholdMode>)]
    threshold: Vec<ThresholdMode>,
    #[arg(long)]
    max_iter: Option<u64>,
    /// Report file; the csv format also writes `<out>.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Relation such as `(-1,2,3+1*w)`.
    #[arg(long, allow_hyphen_values = true)]
    relation: String,
    /// Test set holding the vector; constants are recomputed at `--digits`.
    #[arg(long, conflicts_with = "input")]
    set: Option<PathBuf>,
    #[arg(long, requires = "set")]
    instance: Option<usize>,
    /// Vector file, parsed at `--digits`.
    #[arg(long, requires = "d")]
    input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<i64>,
    #[arg(long, default_value_t = 1000)]
    digits: u32,
}

fn parse_with<T: std::str::FromStr<Err = apslq::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: apslq::Error| e.to_string())
}

fn ring_from(d: i64) -> Result<QuadraticRing> {
    Ok(QuadraticRing::from_id(d)?)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_text(path: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    match path {
        Some(p) => File::open(p).with_context(|| format!("opening {}", p.display()))?.read_to_string(&mut s)?,
        None => io::stdin().read_to_string(&mut s)?,
    };
    Ok(s)
}

fn read_vector(text: &str, ctx: &PrecisionContext) -> Result<Vec<BigComplex>> {
    let x = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| ctx.parse_complex(t))
        .collect::<apslq::Result<Vec<_>>>()?;
    if x.len() < 2 {
        bail!("need at least two entries, got {}", x.len());
    }
    Ok(x)
}

fn load_set(path: &Path) -> Result<TestSet> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    TestSet::read_json(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn generate(a: GenerateArgs) -> Result<()> {
    let mut spec = TestSetSpec::new(ring_from(a.d)?, a.pool, a.size, a.count, a.seed)?;
    if let Some(p) = a.precision {
        spec = spec.with_precision(PrecisionContext::new(p)?);
    }
    let set = generate_test_set(&spec)?;
    let mut w = output(a.out.as_deref())?;
    set.write_json(&mut w)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let ring = ring_from(a.d)?;
    let ctx = PrecisionContext::new(a.precision)?;
    let x = read_vector(&read_text(a.input.as_deref())?, &ctx)?;
    let config = MethodConfig::new(a.method, a.solver.gamma.clone())
        .with_threshold(a.solver.threshold)
        .with_max_iterations(a.solver.max_iter);
    let cfg = config.solver_config(config.solving_ring(ring, &x), &ctx)?;
    let mut out = io::stdout().lock();
    match a.method {
        Method::Apslq => {
            let res = match &a.trace {
                Some(p) => solve_traced(&x, ring, &cfg, &mut BufWriter::new(File::create(p)?))?,
                None => apslq::solve(&x, ring, &cfg)?,
            };
            match (&res.status, &res.relation) {
                (SolverStatus::Relation, Some(rel)) => {
                    let r = residual(rel, &x, &RingContext::new(ring, ctx));
                    writeln!(out, "{}", format_relation(rel))?;
                    writeln!(out, "iterations {} residual {}", res.iterations_used, r.to_decimal_string(6))?;
                }
                _ => {
                    writeln!(out, "FAIL after {} iterations", res.iterations_used)?;
                    if let Some(n) = &res.note {
                        writeln!(out, "note: {n}")?;
                    }
                    writeln!(out, "no relation of norm below {}", res.final_bound.to_decimal_string(6))?;
                }
            }
        }
        Method::Reduction => {
            if a.trace.is_some() {
                bail!("--trace applies to the apslq method only");
            }
            let res = reduction_solve(&x, ring, &cfg)?;
            let iters = res.inner.as_ref().map_or(0, |o| o.iterations_used);
            match res.status {
                ReductionStatus::Relation => {
                    writeln!(out, "{}", format_relation(res.relation.as_deref().unwrap_or_default()))?;
                }
                ReductionStatus::InvalidReconstruction => {
                    let m = res.reconstructed.as_deref().unwrap_or_default();
                    writeln!(out, "INVALID reconstruction {}", format_relation(m))?;
                }
                ReductionStatus::Fail => writeln!(out, "FAIL")?,
            }
            writeln!(out, "iterations {iters}")?;
        }
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let set = load_set(&a.set)?;
    let mut configs = Vec::new();
    for m in &a.method {
        for g in &a.gamma {
            for t in &a.threshold {
                configs.push(MethodConfig::new(*m, g.clone()).with_threshold(*t).with_max_iterations(a.max_iter));
            }
        }
    }
    let report = run_experiment(&set, &configs);
    match a.format {
        Format::Json => {
            let mut w = output(a.out.as_deref())?;
            report.write_json(&mut w)?;
            writeln!(w)?;
            w.flush()?;
        }
        Format::Csv => {
            let mut w = output(a.out.as_deref())?;
            report.write_csv(&mut w)?;
            w.flush()?;
            if let Some(p) = &a.out {
                let mut name = p.clone().into_os_string();
                name.push(".summary.json");
                let mut s = output(Some(Path::new(&name)))?;
                report.write_summary_json(&mut s)?;
                s.flush()?;
            }
        }
    }
    for c in &report.cells {
        eprintln!("{} gamma={} threshold={}: {}", c.config.method, c.config.gamma, c.config.threshold, c.tally);
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let ctx = PrecisionContext::new(a.digits)?;
    let (ring, x) = match (&a.set, &a.input) {
        (Some(path), _) => {
            let set = load_set(path)?;
            let idx = a.instance.unwrap_or(0);
            let inst = set
                .instances
                .get(idx)
                .with_context(|| format!("instance {idx} out of range (set has {})", set.instances.len()))?;
            (set.ring(), inst.evaluate_at(&ctx)?)
        }
        (None, Some(path)) => {
            let d = a.d.context("--d is required with --input")?;
            (ring_from(d)?, read_vector(&read_text(Some(path))?, &ctx)?)
        }
        (None, None) => bail!("give either --set or --input"),
    };
    let rel = parse_relation(&a.relation, ring)?;
    if rel.len() != x.len() {
        bail!("relation has {} entries, vector has {}", rel.len(), x.len());
    }
    let r = residual(&rel, &x, &RingContext::new(ring, ctx));
    println!("{}", r.to_decimal_string(10));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Experiment(a) => experiment(a),
        Command::Verify(a) => verify(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
