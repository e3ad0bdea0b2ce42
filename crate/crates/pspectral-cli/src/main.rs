//! `pspectral`: multiway p-spectral graph clustering from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};

use pspectral::model::HessianMode;

use pspectral_cli::pipeline::{self, CliError, InputSource, Mode, PipelineConfig, Stage};

/// Environment variable consulted for the default worker count; the
/// `--threads` flag takes precedence.
const THREADS_ENV: &str = "PSPECTRAL_THREADS";

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  invalid flags or configuration
  3  unreadable or malformed input
  4  structural graph problem (e.g. isolated nodes)
  5  solver failure
  6  clustering or metric failure
  7  output write failure
  8  bench-mode determinism violation

Errors additionally emit a single-line JSON record on stderr with fields
stage, exit_code, and message.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HessianModeArg {
    Sparse,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Continuation solve from p = 2 down to --p-final.
    Cluster,
    /// Single solve at p = 2 (the linear spectral baseline).
    BaselineP2,
    /// Strong-scaling harness: repeats the solve at each --bench-threads
    /// count and verifies bitwise identical outputs before reporting.
    Bench,
}

#[derive(Debug, Parser)]
#[command(
    name = "pspectral",
    version,
    about = "Multiway p-spectral graph clustering",
    after_help = EXIT_CODES,
    group(ArgGroup::new("source").required(true).args(["input", "synthetic", "synthetic_file"]))
)]
struct Cli {
    /// Matrix Market file holding the (symmetric) weighted adjacency.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Inline synthetic graph spec, e.g.
    /// "family=ring-of-cliques,cliques=4,clique_size=5".
    #[arg(long)]
    synthetic: Option<String>,

    /// File with one synthetic-spec key=value pair per line.
    #[arg(long)]
    synthetic_file: Option<PathBuf>,

    /// Number of clusters (>= 2).
    #[arg(short, long)]
    k: usize,

    /// Target p for the continuation, in (1, 2].
    #[arg(long, default_value_t = 1.2)]
    p_final: f64,

    /// Multiplicative p reduction per continuation stage, in (0, 1).
    #[arg(long, default_value_t = 0.9)]
    p_factor: f64,

    /// Gradient-norm stopping tolerance (default scales with problem size).
    #[arg(long)]
    grad_tol: Option<f64>,

    /// Hessian operator variant used by the inner Newton solver.
    #[arg(long, value_enum, default_value_t = HessianModeArg::Sparse)]
    hessian_mode: HessianModeArg,

    /// Worker threads. Falls back to $PSPECTRAL_THREADS, then to 1.
    #[arg(long)]
    threads: Option<usize>,

    /// Seed for initialization, synthetic generation, and k-means.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// k-means restarts.
    #[arg(long, default_value_t = 10)]
    restarts: usize,

    /// Write "node cluster" assignment lines here.
    #[arg(long)]
    out_assignments: Option<PathBuf>,

    /// Write the JSON run report here.
    #[arg(long)]
    out_report: Option<PathBuf>,

    /// Write the per-iteration CSV solver trace here.
    #[arg(long)]
    out_trace: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ModeArg::Cluster)]
    mode: ModeArg,

    /// Thread counts for bench mode, ascending and starting at 1.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    bench_threads: Vec<usize>,

    /// Proceed even if the graph has isolated nodes.
    #[arg(long)]
    allow_isolated: bool,

    /// Normalize embedding rows to unit length before k-means.
    #[arg(long)]
    row_normalize: bool,
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| {
                CliError::new(
                    Stage::Config,
                    format!("{THREADS_ENV}='{s}' is not a positive integer"),
                )
            }),
        Err(_) => Ok(None),
    }
}

fn build_config(cli: Cli) -> Result<PipelineConfig, CliError> {
    let source = if let Some(path) = cli.input {
        InputSource::MatrixMarket(path)
    } else if let Some(spec) = cli.synthetic {
        InputSource::Synthetic(spec)
    } else if let Some(path) = cli.synthetic_file {
        InputSource::SyntheticFile(path)
    } else {
        unreachable!("clap enforces the source group");
    };
    let threads = match cli.threads {
        Some(t) => t,
        None => threads_from_env()?.unwrap_or(1),
    };
    Ok(PipelineConfig {
        source,
        k: cli.k,
        p_final: cli.p_final,
        p_factor: cli.p_factor,
        grad_tol: cli.grad_tol,
        hessian_mode: match cli.hessian_mode {
            HessianModeArg::Sparse => HessianMode::Sparse,
            HessianModeArg::Full => HessianMode::Full,
        },
        threads,
        seed: cli.seed,
        restarts: cli.restarts,
        mode: match cli.mode {
            ModeArg::Cluster => Mode::Cluster,
            ModeArg::BaselineP2 => Mode::BaselineP2,
            ModeArg::Bench => Mode::Bench,
        },
        bench_threads: cli.bench_threads,
        allow_isolated: cli.allow_isolated,
        row_normalize: cli.row_normalize,
        out_assignments: cli.out_assignments,
        out_report: cli.out_report,
        out_trace: cli.out_trace,
    })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let run = build_config(cli).and_then(|cfg| pipeline::run_pipeline(&cfg));
    match run {
        Ok(report) => {
            let r = &report.results;
            println!(
                "n={} m={} mode={} k={} F={:.6e} rcut={:.6} sizes={:?}{}",
                r.graph.n,
                r.graph.m,
                r.mode,
                r.k,
                r.final_objective,
                r.rcut,
                r.cluster_sizes,
                r.accuracy
                    .map(|a| format!(" accuracy={a:.4}"))
                    .unwrap_or_default(),
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string(&e).unwrap_or_else(|_| e.message.clone())
            );
            ExitCode::from(e.code as u8)
        }
    }
}
