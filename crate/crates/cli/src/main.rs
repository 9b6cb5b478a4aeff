//! `pbc`: generate benchmark data, cluster it, score labelings and sweep
//! parameters.
//!
//! Exit codes: 0 success, 1 I/O or malformed input, 2 usage or
//! configuration error, 3 pipeline stage error.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pbc::Symmetrization;

use crate::commands::{Grid, SweepSpec};
use crate::config::{ConfigFile, Overrides, RunConfig, Source, DEFAULT_N};
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "pbc",
    version,
    about = "Path-based clustering of points near intersecting manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic benchmark and write it as a labeled CSV.
    Generate(GenerateArgs),
    /// Cluster a CSV file or a freshly generated benchmark.
    Cluster(ClusterArgs),
    /// Score a labeling against ground truth.
    Eval(EvalArgs),
    /// Run the pipeline over a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// TP, TSI, FS, DSPR, RP, CP, TSH, RCC or self-cross.
    name: String,
    #[arg(long, default_value_t = DEFAULT_N)]
    n: usize,
    /// Noise radius; defaults to one percent of the benchmark's scale.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; defaults to <NAME>.csv in $PBC_OUT_DIR or the working directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// CSV of points, one row per point.
    #[arg(long, conflicts_with = "benchmark")]
    input: Option<PathBuf>,
    /// The last column of --input holds ground-truth labels.
    #[arg(long, requires = "input")]
    labeled: bool,
    /// Generate this benchmark instead of reading a file.
    #[arg(long)]
    benchmark: Option<String>,
    /// Benchmark sample size.
    #[arg(long)]
    n: Option<usize>,
    /// Benchmark noise radius.
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Neighbors per point.
    #[arg(short, long)]
    q: Option<usize>,
    /// Number of clusters.
    #[arg(short, long)]
    k: Option<usize>,
    /// Number of landmarks.
    #[arg(short = 'm', long)]
    landmarks: Option<usize>,
    /// Minimum interior angle: radians, or degrees with a `deg` suffix.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Graph symmetrization: union or mutual.
    #[arg(long)]
    mode: Option<Symmetrization>,
    /// Project onto this many principal components first.
    #[arg(long)]
    pca_dims: Option<usize>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; defaults to $PBC_OUT_DIR or the working directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted labels (last column is read).
    labels: PathBuf,
    /// Ground truth (last column is read).
    truth: PathBuf,
    /// Diagnostics of the run, whose parameters are echoed in the report.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated neighbor counts.
    #[arg(short, long)]
    q: String,
    /// Comma-separated angles (radians, or degrees with `deg`).
    #[arg(long)]
    alpha: String,
    /// Comma-separated landmark counts.
    #[arg(short = 'm', long)]
    landmarks: String,
    /// Comma-separated seeds.
    #[arg(long, default_value = "0")]
    seeds: String,
    /// Number of clusters; defaults to the number of ground-truth classes.
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long, default_value = "union")]
    mode: Symmetrization,
    #[arg(long)]
    pca_dims: Option<usize>,
    /// Evaluate angles on demand instead of caching them per graph.
    #[arg(long)]
    no_cache: bool,
    /// Output CSV; defaults to sweep.csv in $PBC_OUT_DIR or the working directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn run_cluster(args: ClusterArgs) -> CliResult<()> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let flags = Overrides {
        input: args.source.input,
        labeled: args.source.labeled,
        benchmark: args.source.benchmark,
        n: args.source.n,
        noise: args.source.noise,
        q: args.q,
        k: args.k,
        landmarks: args.landmarks,
        alpha: args.alpha,
        seed: args.seed,
        mode: args.mode,
        pca_dims: args.pca_dims,
        out_dir: args.out_dir,
    };
    let config = RunConfig::resolve(file, flags, commands::labeled_class_count)?;
    let out = commands::cluster(&config)?;
    print!(
        "wrote {}, {}, {}: F={} zero-signature points={}",
        out.labels.display(),
        out.diagnostics.display(),
        out.plot.display(),
        out.result.f,
        out.result.zero_signature_count
    );
    match out.accuracy {
        Some(a) => println!(" accuracy={a:.4}"),
        None => println!(),
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> CliResult<()> {
    let grid = Grid::parse(&args.q, &args.alpha, &args.landmarks, &args.seeds)?;
    let s = args.source;
    let source = match (s.input, s.benchmark) {
        (Some(path), None) => Source::File {
            path,
            labeled: s.labeled,
        },
        (None, Some(name)) => {
            let bench: pbc::datagen::Benchmark = name
                .parse()
                .map_err(|e: pbc::Error| CliError::Usage(e.to_string()))?;
            Source::Benchmark {
                name: bench.name().to_string(),
                n: s.n.unwrap_or(DEFAULT_N),
                noise: s.noise.unwrap_or_else(|| bench.default_noise()),
            }
        }
        _ => {
            return Err(CliError::Usage(
                "an input file or a benchmark is required".into(),
            ))
        }
    };
    let spec = SweepSpec {
        source,
        k: args.k,
        mode: args.mode,
        pca_dims: args.pca_dims,
        use_cache: !args.no_cache,
    };
    let rows = commands::sweep(&spec, &grid)?;
    let path = args.out.unwrap_or_else(commands::default_sweep_path);
    commands::write_sweep(&path, &rows)?;
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    println!(
        "wrote {}: {} rows, {} failed",
        path.display(),
        rows.len(),
        failed
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(a) => {
            commands::generate(&a.name, a.n, a.noise, a.seed, a.out).map(|_| ())
        }
        Command::Cluster(a) => run_cluster(a),
        Command::Eval(a) => {
            let report = commands::eval(&a.labels, &a.truth, a.diagnostics.as_deref())?;
            let text =
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Io(e.to_string()))
                }
                _ => Ok(()),
            }
        }
        Command::Sweep(a) => run_sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pbc: {e}");
            e.exit_code()
        }
    }
}
