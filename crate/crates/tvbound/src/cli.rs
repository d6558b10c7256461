//! Command-line front end. Every subcommand prints one JSON document to
//! stdout and a short human-readable summary to stderr, and echoes the
//! seeds that determine its output.
//!
//! Exit codes: 0 on success, 2 for usage/parse/parameter errors, 3 when
//! a statistical assertion fails (a coverage audit or a convergence
//! check), 4 when a packing construction cannot reach its target size.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bounds::{
    tv_lower_lemma33, tv_lower_remark, tv_lower_thm2, tv_upper_lemma31, tv_upper_thm1, BoundKind,
    BoundReport,
};
use crate::empirical::{empirical_measure, phi, EmpiricalMeasure};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::experiment::{convergence_curve, run_coverage_with, ExperimentConfig};
use crate::minimax::{build_packing, empirical_minimax_risk, PackingFamily};
use crate::oracle::{bk_sandwich, expected_phi_upper, lambda_m, phi_high_prob_bound};
use crate::rademacher::RademacherReport;
use crate::sampling::{make_family, FamilySpec, Sample};

#[derive(Parser)]
#[command(
    name = "tvbound",
    version,
    about = "Empirical total-variation confidence bounds for discrete distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Confidence bounds on TV(truth, empirical) from a sample file alone.
    Bound(BoundArgs),
    /// Exact empirical Rademacher complexity of a sample, with its
    /// analytic sandwiches.
    Rademacher(RademacherArgs),
    /// Oracle quantities of a named family at sample size m.
    Lambda(LambdaArgs),
    /// Coverage experiment driven by a JSON config.
    Simulate(SimulateArgs),
    /// Monte Carlo minimax risk over a packing family.
    Minimax(MinimaxArgs),
    /// Build a pairwise-separated packing family.
    Packing(PackingArgs),
    /// Mean-Φ decay along an increasing sample-size schedule.
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Sample file: optional `# seed=<u64> source=<label>` header, then
    /// one positive integer draw per line.
    sample: PathBuf,
    /// Confidence parameter δ in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Bound kinds to compute, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = BoundKind::ALL)]
    kinds: Vec<BoundKind>,
}

#[derive(Args)]
struct RademacherArgs {
    /// Sample file in the same format as `bound`.
    sample: PathBuf,
}

#[derive(Args)]
struct LambdaArgs {
    /// Family spec, e.g. uniform(10), two_point(0.1), geometric(0.5,64),
    /// zipf(2,100), point_mass(3).
    #[arg(long)]
    family: String,
    /// Sample size m.
    #[arg(long)]
    m: usize,
    /// Optional δ; adds the high-probability Φ comparison value.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Path to the experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Artifact base path: writes <out>.json and <out>.csv, overriding
    /// any paths in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force sequential trial execution.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct MinimaxArgs {
    /// Alphabet size (even, at least 16).
    #[arg(long)]
    d: u64,
    /// Separation parameter ε in (0, 1/16).
    #[arg(long)]
    epsilon: f64,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    /// Monte Carlo trials per packing member.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Artifact base path: writes <out>_packing.json and one
    /// <out>_risk_m<m>.csv per sample size.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PackingArgs {
    /// Alphabet size (even, at least 16).
    #[arg(long)]
    d: u64,
    /// Separation parameter ε in (0, 1/16).
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the family JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Family spec, as in `lambda`.
    #[arg(long)]
    family: String,
    /// Strictly increasing sample sizes, comma separated (at least two).
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    /// Monte Carlo trials per sample size.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses the process arguments and runs one subcommand, returning the
/// process exit code. Usage errors exit with code 2 via clap itself.
pub fn run() -> u8 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::PackingConstruction { .. } => 4,
                _ => 2,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Rademacher(args) => cmd_rademacher(args),
        Command::Lambda(args) => cmd_lambda(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Minimax(args) => cmd_minimax(args),
        Command::Packing(args) => cmd_packing(args),
        Command::Convergence(args) => cmd_convergence(args),
    }
}

fn load_sample(path: &PathBuf) -> Result<(Sample, EmpiricalMeasure)> {
    let text = fs::read_to_string(path)?;
    let sample = Sample::from_text(&text)?;
    let e = empirical_measure(&sample);
    Ok((sample, e))
}

fn sample_header(s: &Sample) -> serde_json::Value {
    json!({ "m": s.len(), "seed": s.master_seed(), "source": s.source_label() })
}

fn cmd_bound(args: BoundArgs) -> Result<u8> {
    let (sample, e) = load_sample(&args.sample)?;
    let r = RademacherReport::from_empirical(&e);
    let mut reports: Vec<BoundReport> = Vec::with_capacity(args.kinds.len());
    for kind in args.kinds {
        reports.push(match kind {
            BoundKind::Thm1Upper => tv_upper_thm1(&e, args.delta)?,
            BoundKind::Thm2Lower => tv_lower_thm2(&e, args.delta)?,
            BoundKind::Lemma31Upper => tv_upper_lemma31(&r, args.delta)?,
            BoundKind::Lemma33Lower => tv_lower_lemma33(&r, args.delta)?,
            BoundKind::RemarkLower => tv_lower_remark(&r, args.delta)?,
        });
    }

    eprintln!(
        "sample: m={} seed={} source={}",
        sample.len(),
        sample.master_seed(),
        sample.source_label()
    );
    eprintln!(
        "phi={} rademacher_exact={} delta={}",
        phi(&e),
        r.exact,
        args.delta
    );
    for report in &reports {
        eprintln!(
            "{} = {}{}",
            report.kind,
            report.bound_value,
            if report.vacuous { " (vacuous)" } else { "" }
        );
    }

    print_json(&json!({
        "sample": sample_header(&sample),
        "delta": args.delta,
        "phi": phi(&e),
        "rademacher_exact": r.exact,
        "reports": reports,
    }));
    Ok(0)
}

fn cmd_rademacher(args: RademacherArgs) -> Result<u8> {
    let (sample, e) = load_sample(&args.sample)?;
    let report = RademacherReport::from_empirical(&e);

    eprintln!(
        "sample: m={} seed={} source={}",
        sample.len(),
        sample.master_seed(),
        sample.source_label()
    );
    eprintln!(
        "exact={} khintchine=[{}, {}] wallis=[{}, {}]",
        report.exact,
        report.khintchine_lower,
        report.khintchine_upper,
        report.wallis_lower,
        report.wallis_upper
    );

    print_json(&json!({ "sample": sample_header(&sample), "report": report }));
    Ok(0)
}

fn cmd_lambda(args: LambdaArgs) -> Result<u8> {
    let d = make_family(&args.family)?;
    let lambda = lambda_m(&d, args.m)?;
    let bk = bk_sandwich(&d, args.m)?;
    let epu = expected_phi_upper(&d, args.m)?;
    let php = match args.delta {
        Some(delta) => Some(phi_high_prob_bound(&d, args.m, delta)?),
        None => None,
    };

    eprintln!("family={} m={}", args.family, args.m);
    eprintln!(
        "lambda={} bk=[{}, {}]{} expected_phi_upper<={}",
        lambda.lambda,
        bk.lower,
        bk.upper,
        if bk.vacuous { " (lower vacuous)" } else { "" },
        epu
    );
    if let (Some(delta), Some(v)) = (args.delta, php) {
        eprintln!("phi_high_prob(delta={delta})={v}");
    }

    print_json(&json!({
        "family": args.family,
        "m": args.m,
        "lambda": lambda,
        "bk": bk,
        "expected_phi_upper": epu,
        "delta": args.delta,
        "phi_high_prob": php,
    }));
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8> {
    let cfg = ExperimentConfig::from_json(&fs::read_to_string(&args.config)?)?;
    cfg.validate()?;
    let mode = if args.serial {
        ExecMode::Serial
    } else {
        ExecMode::Parallel
    };
    let result = run_coverage_with(&cfg, mode)?;

    let (json_path, csv_path) = match &args.out {
        Some(base) => (
            Some(base.with_extension("json")),
            Some(base.with_extension("csv")),
        ),
        None => (cfg.outputs.json.clone(), cfg.outputs.csv.clone()),
    };
    if let Some(path) = &json_path {
        fs::write(path, result.to_json() + "\n")?;
    }
    if let Some(path) = &csv_path {
        fs::write(path, result.to_csv())?;
    }

    eprintln!(
        "family={} trials={} master_seed={} generator={}",
        cfg.family, cfg.trials, cfg.master_seed, result.generator
    );
    for s in &result.per_m {
        eprintln!(
            "m={}: mean_tv={} mean_phi={} mean_missing_mass={} mean_rademacher_exact={}",
            s.m, s.mean_tv, s.mean_phi, s.mean_missing_mass, s.mean_rademacher_exact
        );
    }
    for c in &result.coverage {
        eprintln!(
            "m={} delta={} {}: coverage={} (se={})",
            c.m, c.delta, c.kind, c.coverage_hat, c.se
        );
    }

    let failures = result.audit_failures();
    print_json(&serde_json::to_value(&result)?);
    if failures.is_empty() {
        eprintln!("audit: PASS ({} cells)", result.coverage.len());
        Ok(0)
    } else {
        for f in &failures {
            eprintln!("audit failure: {f}");
        }
        eprintln!(
            "audit: FAIL ({} of {} cells)",
            failures.len(),
            result.coverage.len()
        );
        Ok(3)
    }
}

fn packing_summary(family: &PackingFamily) -> Result<()> {
    eprintln!(
        "d={} epsilon={} seed={}: {} members, min pairwise tv={}, kl budget ratio={}",
        family.d,
        family.epsilon,
        family.seed,
        family.members.len(),
        family.min_pairwise_tv(),
        family.kl_budget_ratio()?
    );
    Ok(())
}

fn cmd_minimax(args: MinimaxArgs) -> Result<u8> {
    let family = build_packing(args.d, args.epsilon, args.seed)?;
    packing_summary(&family)?;

    let mut risks = Vec::with_capacity(args.m.len());
    for &m in &args.m {
        let report = empirical_minimax_risk(&family, m, args.trials, args.seed)?;
        eprintln!(
            "m={}: max_risk={} over {} members",
            m,
            report.max_risk,
            family.members.len()
        );
        if let Some(base) = &args.out {
            let mut path = base.as_os_str().to_owned();
            path.push(format!("_risk_m{m}.csv"));
            fs::write(PathBuf::from(path), report.to_csv())?;
        }
        risks.push(report);
    }
    if let Some(base) = &args.out {
        let mut path = base.as_os_str().to_owned();
        path.push("_packing.json");
        fs::write(
            PathBuf::from(path),
            serde_json::to_string_pretty(&family)? + "\n",
        )?;
    }

    print_json(&json!({ "packing": family, "risks": risks }));
    Ok(0)
}

fn cmd_packing(args: PackingArgs) -> Result<u8> {
    let family = build_packing(args.d, args.epsilon, args.seed)?;
    packing_summary(&family)?;
    if let Some(path) = &args.out {
        fs::write(path, serde_json::to_string_pretty(&family)? + "\n")?;
    }
    print_json(&serde_json::to_value(&family)?);
    Ok(0)
}

fn cmd_convergence(args: ConvergenceArgs) -> Result<u8> {
    let spec: FamilySpec = args.family.parse()?;
    let curve = convergence_curve(spec, &args.m, args.trials, args.seed)?;

    eprintln!(
        "family={} trials={} seed={}",
        curve.family, curve.trials, curve.seed
    );
    for p in &curve.points {
        eprintln!(
            "m={}: mean_phi={} (se={}) mean_tv={}",
            p.m, p.mean_phi, p.se_phi, p.mean_tv
        );
    }

    print_json(&serde_json::to_value(&curve)?);
    if curve.endpoint_decrease {
        Ok(0)
    } else {
        eprintln!(
            "convergence check failed: mean phi did not decrease from m={} to m={}",
            curve.points.first().unwrap().m,
            curve.points.last().unwrap().m
        );
        Ok(3)
    }
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON output cannot fail")
    );
}
