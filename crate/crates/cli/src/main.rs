use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use recycle_core::experiments::{
    bound_curves, default_bound_c_grid, reference_optimum, run_sweep, synth_gaussian,
    synth_pathological, BoundMode, BoundParams, GaussianSpec, LambdaPolicy,
};
use recycle_core::io::{
    read_libsvm_file, unix_now, write_alpha_csv, write_bound_csv, write_libsvm, write_sweep_files,
    write_trajectory_csv, RunManifest, SweepFile, MANIFEST_FILE,
};
use recycle_core::{
    run_solver, Algorithm, Dataset, Error as CoreError, RecordOptions, SamplerKind, SmoothedHinge,
    SolverConfig,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

/// Data recycling experiments for stochastic linear SVM solvers.
#[derive(Debug, Parser)]
#[command(name = "recycle-opt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a (T, c, lambda) sweep described by a config file.
    Sweep(SweepArgs),
    /// Run one solver and write its trajectory as CSV.
    Trace(TraceArgs),
    /// Compute a certified reference optimum.
    Optimum(OptimumArgs),
    /// Generate a synthetic dataset in LIBSVM format.
    Synth(SynthArgs),
    /// Evaluate the heuristic excess-risk bound over a grid of c.
    Bounds(BoundsArgs),
    /// Validate a LIBSVM file.
    ParseCheck(DataArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// LIBSVM input file.
    #[arg(long)]
    data: PathBuf,
    /// Feature dimension; defaults to the largest index in the file.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    algo: Algorithm,
    #[arg(long, default_value = "iid")]
    sampler: SamplerKind,
    #[arg(long)]
    lambda: f64,
    /// Number of stochastic steps.
    #[arg(long = "T", value_name = "T")]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record every k steps (epoch boundaries are always recorded); defaults to m.
    #[arg(long)]
    record_every: Option<u64>,
    /// Absolute stepsize, required by sag and svrg.
    #[arg(long)]
    stepsize: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    svrg_inner_multiplier: f64,
    /// Duality-gap tolerance of the reference optimum.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Skip the reference optimum; suboptimality columns are then NaN.
    #[arg(long)]
    no_reference: bool,
    /// Trajectory CSV; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-epoch dual variables (SDCA only).
    #[arg(long)]
    alpha_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptimumArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON output; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SynthKind {
    Pathological,
    Gaussian,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Number of points for the pathological set.
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Number of points for the gaussian set.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    d: usize,
    /// Label flip probability.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = GaussianSpec::DEFAULT_MEAN_NORM)]
    mean_norm: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// LIBSVM output; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    norm_w0: f64,
    #[arg(long, default_value_t = 0.0)]
    risk_w0: f64,
    #[arg(long)]
    d: usize,
    #[arg(long = "T", value_name = "T")]
    budget: u64,
    /// Used as-is with `--lambda-policy fixed`.
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long, default_value = "rv")]
    mode: BoundMode,
    #[arg(long, default_value = "minimized")]
    lambda_policy: LambdaPolicy,
    /// CSV output; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(args: &DataArgs) -> Result<Dataset> {
    read_libsvm_file(&args.data, args.dim)
        .with_context(|| format!("reading {}", args.data.display()))
}

fn sweep(args: SweepArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CoreError::Io(format!("{}: {e}", args.config.display())))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let file =
        SweepFile::parse(&text, base).with_context(|| format!("in {}", args.config.display()))?;
    let out = args.out.or(file.out_dir.clone()).ok_or_else(|| {
        CoreError::InvalidParameter("no output directory: pass --out or set out_dir".into())
    })?;
    let started = unix_now();
    let pool = file.data.load()?;
    let result = run_sweep(&file.sweep, &pool)?;
    write_sweep_files(&result, &out)?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        started_unix_secs: started,
        finished_unix_secs: unix_now(),
        base_seed: file.sweep.base_seed,
        config: file.sweep,
        data: file.data,
        pool_size: pool.len(),
        pool_dim: pool.dim(),
        cells: result.runs,
    };
    manifest.write(writer(Some(&out.join(MANIFEST_FILE)))?)?;
    for o in &result.optimal {
        eprintln!(
            "T={} optimal c={} error={}",
            o.budget, o.optimal_c, o.error_at_optimal_c
        );
    }
    Ok(())
}

fn trace(args: TraceArgs) -> Result<()> {
    let data = load(&args.data)?;
    let mut cfg = SolverConfig::new(args.algo, args.lambda, args.budget)
        .with_sampler(args.sampler)
        .with_seed(args.seed)
        .with_loss(SmoothedHinge::new(args.gamma)?);
    cfg.svrg_inner_multiplier = args.svrg_inner_multiplier;
    if let Some(s) = args.stepsize {
        cfg = cfg.with_stepsize(s);
    }
    cfg.validate()?;
    let reference = if args.no_reference {
        None
    } else {
        Some(reference_optimum(
            &data,
            args.lambda,
            cfg.loss,
            args.tol,
            args.seed,
        )?)
    };
    let mut options = RecordOptions::every(args.record_every.unwrap_or(data.len() as u64).max(1));
    if reference.is_some() {
        options = options.with_suboptimality();
    }
    if args.alpha_out.is_some() {
        options = options.with_alpha_snapshots();
    }
    let run = run_solver(&cfg, &data, options, reference.as_ref())?;
    write_trajectory_csv(&run.trajectory, writer(args.out.as_deref())?)?;
    if let Some(path) = &args.alpha_out {
        write_alpha_csv(&run.trajectory.alpha_snapshots, writer(Some(path))?)?;
    }
    Ok(())
}

fn optimum(args: OptimumArgs) -> Result<()> {
    let data = load(&args.data)?;
    let r = reference_optimum(
        &data,
        args.lambda,
        SmoothedHinge::new(args.gamma)?,
        args.tol,
        args.seed,
    )?;
    let mut out = writer(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &r)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let data = match args.kind {
        SynthKind::Pathological => synth_pathological(args.m, args.seed)?,
        SynthKind::Gaussian => synth_gaussian(
            GaussianSpec::new(args.n, args.d, args.noise).with_mean_norm(args.mean_norm),
            args.seed,
        )?,
    };
    write_libsvm(&data, writer(args.out.as_deref())?)?;
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let params = BoundParams {
        norm_w0: args.norm_w0,
        risk_w0: args.risk_w0,
        d: args.d,
        t: args.budget,
        lambda: args.lambda,
        c: 1.0,
    };
    let curve = bound_curves(
        &params,
        args.mode,
        args.lambda_policy,
        &default_bound_c_grid(),
    )?;
    write_bound_csv(&curve, writer(args.out.as_deref())?)?;
    if let Some(p) = curve.argmin() {
        eprintln!("argmin c={} lambda={} bound={}", p.c, p.lambda, p.total);
    }
    Ok(())
}

fn parse_check(args: DataArgs) -> Result<()> {
    let data = load(&args)?;
    println!(
        "ok: {} examples, dim {}, {} non-zeros",
        data.len(),
        data.dim(),
        data.nnz()
    );
    Ok(())
}

/// Bad flag values are usage errors; everything else concerns the data.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::InvalidParameter(_)) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Trace(a) => trace(a),
        Command::Optimum(a) => optimum(a),
        Command::Synth(a) => synth(a),
        Command::Bounds(a) => bounds(a),
        Command::ParseCheck(a) => parse_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
