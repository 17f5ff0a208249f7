//! Command-line front end.
//!
//! Subcommands: `sample`, `recover`, `certify`, `montecarlo`, `bounds`.
//! Exit codes: 0 success, 1 configuration/usage error, 2 degenerate
//! theorem-mode truncation (n too small for the requested c), 3 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certificates::Mode;
use crate::density::{draw_samples, importance_diagnostic, SamplingDensity};
use crate::error::{Error, Result};
use crate::harness::{
    emit_report, render_csv, render_json, resolve_plan, run_trials, BuiltModel, ExperimentConfig,
    ModelKind, ModelSpec, ReportFormat, RunPlan, TrialRecord,
};
use crate::model::SpectralModel;
use crate::oracle::{h_norm, l2_error, CoefficientFunction};
use crate::recovery::{build_design, solve, weighted_info};

#[derive(Parser)]
#[command(
    name = "samplerec",
    version,
    about = "Weighted least-squares recovery from random samples: sampling, certificates, Monte Carlo verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a reproducible sample set from the sampling density rho_k
    Sample(SampleArgs),
    /// Recover a function from its values at freshly drawn sample points
    Recover(RecoverArgs),
    /// Evaluate error certificates on realized sample sets
    Certify(CertifyArgs),
    /// Run a seeded Monte Carlo experiment from a JSON config file
    Montecarlo(MontecarloArgs),
    /// Tabulate the truncation schedule and bound quantities across n
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKindArg {
    Discrete,
    Fourier,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Theorem,
    Override,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Theorem => Mode::Theorem,
            ModeArg::Override => Mode::Override,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Model kind
    #[arg(long, value_enum)]
    model: ModelKindArg,
    /// Atom count (discrete; optional, checked against --a)
    #[arg(long)]
    m: Option<usize>,
    /// Non-increasing approximation numbers a_0,a_1,... (discrete)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a: Option<Vec<f64>>,
    /// Smoothness exponent s > 1/2 (fourier, a_j = (j+1)^-s)
    #[arg(long)]
    s: Option<f64>,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        ModelSpec {
            kind: match self.model {
                ModelKindArg::Discrete => ModelKind::Discrete,
                ModelKindArg::Fourier => ModelKind::Fourier,
            },
            m: self.m,
            a: self.a.clone(),
            s: self.s,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Truncation index k >= 1
    #[arg(long)]
    k: usize,
    /// Number of points to draw
    #[arg(long)]
    n: usize,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream id within the master seed
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Reconstruction space dimension k >= 1
    #[arg(long)]
    k: usize,
    /// Number of sample points
    #[arg(long)]
    n: usize,
    /// Target function as L2 coefficients c_1,c_2,...
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    coeffs: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Relative singular-value cutoff
    #[arg(long, default_value_t = crate::recovery::DEFAULT_RANK_TOLERANCE)]
    rank_tolerance: f64,
    /// Optional CSV path for the recovered coefficients
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// theorem: k = k_n schedule; override: fixed --k
    #[arg(long, value_enum, default_value = "theorem")]
    mode: ModeArg,
    /// Sample count per trial
    #[arg(long)]
    n: u64,
    /// Probability exponent c > 0
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Truncation index (override mode only)
    #[arg(long)]
    k: Option<usize>,
    /// Tail truncation J (defaults to the model rank or max(2k, k+256))
    #[arg(long)]
    j: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of independent trials
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Force the exact/truncated worst-case evaluation on or off
    #[arg(long)]
    worstcase: Option<bool>,
    /// Optional CSV path for the trial table
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MontecarloArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Write BASE.csv and BASE.json (overrides out_csv/out_json)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Probability exponent c > 0
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Sample counts, e.g. 1e4,1e5,1e6
    #[arg(long, value_delimiter = ',')]
    n: Vec<String>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point taking the argument list without the program name;
/// returns the process exit code.
pub fn cli_main<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let argv = std::iter::once("samplerec".to_string()).chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // Help goes to stdout, errors (with usage) to stderr.
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sample(a) => run_sample(a),
        Command::Recover(a) => run_recover(a),
        Command::Certify(a) => run_certify(a),
        Command::Montecarlo(a) => run_montecarlo(a),
        Command::Bounds(a) => run_bounds(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::DegenerateK { .. } => 2,
                Error::Io(_) => 3,
                _ => 1,
            }
        }
    }
}

fn write_out(path: Option<&Path>, payload: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::File::create(p)?.write_all(payload.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(payload.as_bytes())?;
            Ok(())
        }
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn run_sample(args: SampleArgs) -> Result<()> {
    match args.model.spec().build()? {
        BuiltModel::Discrete(m) => sample_with(&m, &args),
        BuiltModel::Fourier(m) => sample_with(&m, &args),
    }
}

fn sample_with<M: SpectralModel>(model: &M, args: &SampleArgs) -> Result<()> {
    let density = SamplingDensity::new(model, args.k)?;
    let set = draw_samples(&density, args.n, args.seed, args.stream)?;
    let mut out = String::from("index,point,density\n");
    for (i, (x, rho)) in set.iter().enumerate() {
        out.push_str(&format!("{i},{x},{}\n", fmt_f64(rho)));
    }
    write_out(args.out.as_deref(), &out)?;
    eprintln!(
        "drew {} points (k = {}, seed = {}, stream = {}); acceptance rate {:.3}, importance diagnostic {:.4} (expect {:.4})",
        set.len(),
        args.k,
        args.seed,
        args.stream,
        set.acceptance_rate(),
        importance_diagnostic(&set),
        model.measure_total(),
    );
    Ok(())
}

fn run_recover(args: RecoverArgs) -> Result<()> {
    match args.model.spec().build()? {
        BuiltModel::Discrete(m) => recover_with(&m, &args),
        BuiltModel::Fourier(m) => recover_with(&m, &args),
    }
}

fn recover_with<M: SpectralModel>(model: &M, args: &RecoverArgs) -> Result<()> {
    if args.coeffs.is_empty() {
        return Err(Error::InvalidConfig(
            "recover needs a target function: --coeffs c1,c2,...".into(),
        ));
    }
    let density = SamplingDensity::new(model, args.k)?;
    let samples = draw_samples(&density, args.n, args.seed, args.stream)?;
    let target = CoefficientFunction::new(args.coeffs.clone());
    let values = target.values_at(model, &samples)?;
    let g = build_design(model, args.k, &samples)?;
    let y = weighted_info(&samples, &values)?;
    let output = solve(&g, &y, args.rank_tolerance)?;
    let err = l2_error(&target, &output);

    println!("n = {}, k = {}, rank = {}", args.n, args.k, output.rank);
    if output.rank_deficient {
        println!("design is rank-deficient; minimum-norm solution returned");
    }
    for (j, c) in output.coefficients.iter().enumerate() {
        println!("c_{} = {}", j + 1, fmt_f64(*c));
    }
    println!("weighted residual norm = {}", fmt_f64(output.residual_norm));
    println!("l2 error vs target     = {}", fmt_f64(err));
    match h_norm(model, &target) {
        Ok(h) => println!("target H-norm          = {}", fmt_f64(h)),
        Err(_) => println!("target H-norm          = infinite (coefficient on a zero direction)"),
    }
    if let Some(path) = &args.out {
        let mut csv = String::from("j,coefficient\n");
        for (j, c) in output.coefficients.iter().enumerate() {
            csv.push_str(&format!("{},{}\n", j + 1, fmt_f64(*c)));
        }
        write_out(Some(path), &csv)?;
    }
    Ok(())
}

fn run_certify(args: CertifyArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        model: args.model.spec(),
        mode: args.mode.into(),
        n: args.n,
        c: args.c,
        k: args.k,
        j: args.j,
        trials: args.trials,
        master_seed: args.seed,
        rank_tolerance: None,
        compute_worstcase: args.worstcase,
        out_csv: None,
        out_json: None,
    };
    let (report, plan) = match cfg.model.build()? {
        BuiltModel::Discrete(m) => {
            let plan = resolve_plan(&cfg, m.rank())?;
            (run_trials(&m, &cfg)?, plan)
        }
        BuiltModel::Fourier(m) => {
            let plan = resolve_plan(&cfg, m.rank())?;
            (run_trials(&m, &cfg)?, plan)
        }
    };
    print_certify(&report.records, &plan);
    if report.trials > 1 {
        println!(
            "claim1 frequency   = {} (bound {:.6})",
            opt_f(report.freq_claim1),
            report.bound_claim
        );
        println!(
            "claim2 frequency   = {} (bound {:.6})",
            opt_f(report.freq_claim2),
            report.bound_claim
        );
        println!(
            "theorem frequency  = {} (bound {:.6})",
            opt_f(report.freq_theorem),
            report.bound_theorem
        );
    }
    for fail in &report.failed_trials {
        eprintln!("trial {} failed: {}", fail.trial_index, fail.message);
    }
    if let Some(path) = &args.out {
        emit_report(&report, ReportFormat::Csv, path)?;
    }
    Ok(())
}

fn opt_f(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

fn print_certify(records: &[TrialRecord], plan: &RunPlan) {
    println!(
        "mode = {}, n = {}, k = {}, c = {}, J = {}",
        plan.mode, plan.n, plan.k, plan.c, plan.j_trunc
    );
    for r in records {
        println!("trial {} (stream {}):", r.trial_index, r.seed);
        println!("  smin(G)^2        = {}", fmt_f64(r.smin_g_sq));
        println!("  smax(Gamma_J)    = {}", fmt_f64(r.smax_gamma_j));
        println!("  tail correction  = {}", fmt_f64(r.tail_correction));
        println!("  a_k              = {}", fmt_f64(r.a_k));
        if let Some(bp) = r.beta_prime {
            println!("  beta'_k          = {}", fmt_f64(bp));
        }
        println!("  certificate      = {}", fmt_f64(r.cert_eq2));
        if let Some(w) = r.wc_sq {
            let tag = match r.wc_exact {
                Some(true) => "exact",
                _ => "truncated estimate",
            };
            println!("  worst-case^2     = {} ({tag})", fmt_f64(w));
        }
        if let (Some(c1), Some(c2)) = (r.claim1_pass, r.claim2_pass) {
            println!("  claim1 = {c1}, claim2 = {c2}");
        }
        if let Some(t) = r.theorem_pass {
            println!("  theorem event    = {t}");
        }
        println!("  design rank      = {}", r.rank);
    }
}

fn run_montecarlo(args: MontecarloArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_json_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(base) = &args.out {
        let base = base.to_string_lossy().to_string();
        cfg.out_csv = Some(format!("{base}.csv"));
        cfg.out_json = Some(format!("{base}.json"));
    }
    let report = crate::harness::run_and_emit(&cfg)?;
    print!("{}", render_json(&report)?);
    eprintln!(
        "{} trials in {:.3} s/trial; CSV rows: {}",
        report.trials,
        report.wall_clock_per_trial_secs,
        report.records.len()
    );
    if cfg.out_csv.is_none() && cfg.out_json.is_none() {
        eprintln!("note: no out_csv/out_json configured; trial table:\n{}", render_csv(&report));
    }
    Ok(())
}

fn parse_count(text: &str) -> Result<u64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse count: {text}")))?;
    if v.is_nan() || !(1.0..=9.0e15).contains(&v) || v.fract() != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "count must be a positive integer, got {text}"
        )));
    }
    Ok(v as u64)
}

fn run_bounds(args: BoundsArgs) -> Result<()> {
    if args.n.is_empty() {
        return Err(Error::InvalidConfig("bounds needs --n n1,n2,...".into()));
    }
    let counts = args
        .n
        .iter()
        .map(|t| parse_count(t))
        .collect::<Result<Vec<u64>>>()?;
    let built = args.model.spec().build()?;
    let mut out = String::from("n,c,k_n,beta_prime,theorem_rhs,g_value\n");
    for n in counts {
        let row = match &built {
            BuiltModel::Discrete(m) => bounds_row(m, n, args.c)?,
            BuiltModel::Fourier(m) => bounds_row(m, n, args.c)?,
        };
        out.push_str(&row);
    }
    write_out(args.out.as_deref(), &out)
}

fn bounds_row<M: SpectralModel>(model: &M, n: u64, c: f64) -> Result<String> {
    match crate::certificates::k_of_n(n, c) {
        Ok(k) => {
            let bp = crate::certificates::beta_prime(model, k)?;
            let rhs = crate::certificates::theorem_rhs(model, k)?;
            let g = crate::certificates::oliveira_g(n, (2.0 * k as f64).sqrt(), c)?;
            Ok(format!(
                "{n},{},{k},{},{},{}\n",
                fmt_f64(c),
                fmt_f64(bp),
                fmt_f64(rhs),
                fmt_f64(g.value)
            ))
        }
        // Degenerate schedule: row kept, quantities left empty.
        Err(Error::DegenerateK { .. }) => Ok(format!("{n},{},0,,,\n", fmt_f64(c))),
        Err(e) => Err(e),
    }
}
