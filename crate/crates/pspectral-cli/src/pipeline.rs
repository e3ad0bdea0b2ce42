//! Pipeline stages: ingest, solve, discretize, score, serialize.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use log::warn;
use serde::Serialize;

use pspectral::algebra::KernelContext;
use pspectral::cluster::{confusion_accuracy, kmeans, rcut, ClusterAssignment, KMeansConfig};
use pspectral::graph::{generate_synthetic, parse_matrix_market, Graph, SyntheticSpec};
use pspectral::model::{objective, Embedding, HessianMode};
use pspectral::solver::{
    continuation_solve_stages, init_p2, trust_region_newton, ContinuationSchedule, SolveTrace,
    SolverConfig, StageEmbedding,
};

use crate::report::{BenchResults, GraphStats, Results, RunReport, Timing, SCHEMA_VERSION};

/// Pipeline stage an error belongs to. Each stage maps to a fixed exit code;
/// the taxonomy is part of the CLI contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Invalid flag combinations or out-of-range parameters (exit 2).
    Config,
    /// Unreadable or malformed input (exit 3).
    Input,
    /// Structural graph problems such as isolated nodes (exit 4).
    Graph,
    /// Solver failure (exit 5).
    Solve,
    /// Discretization or metric failure (exit 6).
    Cluster,
    /// Failure writing assignments, trace, or report (exit 7).
    Output,
    /// Bench outputs diverged across thread counts (exit 8).
    Determinism,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Input => 3,
            Stage::Graph => 4,
            Stage::Solve => 5,
            Stage::Cluster => 6,
            Stage::Output => 7,
            Stage::Determinism => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Input => "input",
            Stage::Graph => "graph",
            Stage::Solve => "solve",
            Stage::Cluster => "cluster",
            Stage::Output => "output",
            Stage::Determinism => "determinism",
        }
    }
}

/// Error record emitted on stderr as a single JSON line.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub stage: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip)]
    pub code: i32,
}

impl CliError {
    pub fn new(stage: Stage, message: impl Into<String>) -> Self {
        CliError {
            stage: stage.as_str(),
            exit_code: stage.exit_code(),
            message: message.into(),
            code: stage.exit_code(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum InputSource {
    MatrixMarket(PathBuf),
    Synthetic(String),
    SyntheticFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Cluster,
    BaselineP2,
    Bench,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Cluster => "cluster",
            Mode::BaselineP2 => "baseline-p2",
            Mode::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub source: InputSource,
    pub k: usize,
    pub p_final: f64,
    pub p_factor: f64,
    pub grad_tol: Option<f64>,
    pub hessian_mode: HessianMode,
    pub threads: usize,
    pub seed: u64,
    pub restarts: usize,
    pub mode: Mode,
    pub bench_threads: Vec<usize>,
    pub allow_isolated: bool,
    pub row_normalize: bool,
    pub out_assignments: Option<PathBuf>,
    pub out_report: Option<PathBuf>,
    pub out_trace: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::new(Stage::Config, m));
        if self.k < 2 {
            return bad(format!("--k must be >= 2, got {}", self.k));
        }
        if !(self.p_final > 1.0 && self.p_final <= 2.0) {
            return bad(format!("--p-final must lie in (1, 2], got {}", self.p_final));
        }
        if !(self.p_factor > 0.0 && self.p_factor < 1.0) {
            return bad(format!("--p-factor must lie in (0, 1), got {}", self.p_factor));
        }
        if self.threads < 1 {
            return bad("--threads must be >= 1".into());
        }
        if self.restarts < 1 {
            return bad("--restarts must be >= 1".into());
        }
        if self.mode == Mode::Bench {
            if self.bench_threads.first() != Some(&1) {
                return bad("--bench-threads must start at 1".into());
            }
            if !self.bench_threads.windows(2).all(|w| w[0] < w[1]) {
                return bad("--bench-threads must be strictly ascending".into());
            }
        }
        Ok(())
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            grad_tol: self.grad_tol,
            hessian_mode: self.hessian_mode,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }
}

/// Ingested graph plus ground-truth labels when the source was synthetic.
struct Ingested {
    graph: Graph,
    truth: Option<Vec<usize>>,
}

fn ingest(cfg: &PipelineConfig) -> Result<Ingested, CliError> {
    let ingested = match &cfg.source {
        InputSource::MatrixMarket(path) => {
            let file = File::open(path).map_err(|e| {
                CliError::new(Stage::Input, format!("cannot open {}: {e}", path.display()))
            })?;
            let graph = parse_matrix_market(BufReader::new(file))
                .map_err(|e| CliError::new(Stage::Input, format!("{}: {e}", path.display())))?;
            Ingested { graph, truth: None }
        }
        InputSource::Synthetic(spec) => synthesize(spec, cfg.seed)?,
        InputSource::SyntheticFile(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::new(Stage::Input, format!("cannot read {}: {e}", path.display()))
            })?;
            let joined = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect::<Vec<_>>()
                .join(",");
            synthesize(&joined, cfg.seed)?
        }
    };
    let isolated = ingested.graph.isolated_nodes().len();
    if isolated > 0 {
        if !cfg.allow_isolated {
            return Err(CliError::new(
                Stage::Graph,
                format!(
                    "{isolated} isolated node(s); rerun with --allow-isolated to proceed anyway"
                ),
            ));
        }
        warn!("proceeding with {isolated} isolated node(s)");
    }
    if ingested.graph.n() < cfg.k {
        return Err(CliError::new(
            Stage::Graph,
            format!("k={} exceeds node count {}", cfg.k, ingested.graph.n()),
        ));
    }
    Ok(ingested)
}

fn synthesize(spec: &str, seed: u64) -> Result<Ingested, CliError> {
    let spec = SyntheticSpec::parse_kv(spec, seed)
        .map_err(|e| CliError::new(Stage::Input, e.to_string()))?;
    let (graph, truth) =
        generate_synthetic(&spec).map_err(|e| CliError::new(Stage::Input, e.to_string()))?;
    Ok(Ingested {
        graph,
        truth: Some(truth),
    })
}

fn solve_stage(
    ctx: &KernelContext,
    graph: &Graph,
    cfg: &PipelineConfig,
    mode: Mode,
) -> Result<(Vec<StageEmbedding>, SolveTrace), CliError> {
    let scfg = cfg.solver_config();
    let err = |e: pspectral::solver::SolverError| CliError::new(Stage::Solve, e.to_string());
    match mode {
        Mode::BaselineP2 => {
            let u0 = init_p2(graph, cfg.k, cfg.seed).map_err(err)?;
            let (u, trace) = trust_region_newton(ctx, graph, 2.0, &u0, &scfg).map_err(err)?;
            Ok((vec![StageEmbedding { p: 2.0, embedding: u }], trace))
        }
        _ => {
            let schedule = ContinuationSchedule::new(cfg.p_final, cfg.p_factor).map_err(err)?;
            continuation_solve_stages(ctx, graph, cfg.k, &schedule, &scfg).map_err(err)
        }
    }
}

fn embedding_rows(u: &Embedding, row_normalize: bool) -> Vec<Vec<f64>> {
    (0..u.n())
        .map(|i| {
            let mut row = u.row(i);
            if row_normalize {
                let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.iter_mut().for_each(|x| *x /= norm);
                }
            }
            row
        })
        .collect()
}

fn discretize(
    ctx: &KernelContext,
    u: &Embedding,
    cfg: &PipelineConfig,
) -> Result<(ClusterAssignment, f64), CliError> {
    let points = embedding_rows(u, cfg.row_normalize);
    let kcfg = KMeansConfig {
        restarts: cfg.restarts,
        seed: cfg.seed,
        ..KMeansConfig::default()
    };
    kmeans(ctx, &points, cfg.k, &kcfg).map_err(|e| CliError::new(Stage::Cluster, e.to_string()))
}

/// Best partition found across the continuation levels.
struct SelectedPartition {
    assignment: ClusterAssignment,
    sse: f64,
    rcut: f64,
    best_p: f64,
    rcut_per_p: Vec<(f64, f64)>,
}

/// Discretizes the embedding of every continuation level and keeps the
/// partition with the lowest RCut. Decreasing `p` lowers the continuous
/// objective, but on graphs with weakly attached small vertex sets its
/// minimizers can concentrate on those sets and discretize worse than the
/// `p = 2` solution, so the final level is not automatically the best one;
/// tracking all levels keeps whichever partition actually scores best.
/// Ties keep the earliest (largest-`p`) level.
fn select_partition(
    ctx: &KernelContext,
    graph: &Graph,
    stages: &[StageEmbedding],
    cfg: &PipelineConfig,
) -> Result<SelectedPartition, CliError> {
    let mut best: Option<SelectedPartition> = None;
    let mut rcut_per_p = Vec::with_capacity(stages.len());
    for stage in stages {
        let (assignment, sse) = discretize(ctx, &stage.embedding, cfg)?;
        let rc = rcut(graph, &assignment)
            .map_err(|e| CliError::new(Stage::Cluster, e.to_string()))?;
        rcut_per_p.push((stage.p, rc));
        if best.as_ref().map_or(true, |b| rc < b.rcut) {
            best = Some(SelectedPartition {
                assignment,
                sse,
                rcut: rc,
                best_p: stage.p,
                rcut_per_p: Vec::new(),
            });
        }
    }
    let mut best = best.expect("at least one continuation level");
    best.rcut_per_p = rcut_per_p;
    Ok(best)
}

fn score_accuracy(
    assignment: &ClusterAssignment,
    truth: &Option<Vec<usize>>,
    k: usize,
) -> Option<f64> {
    let labels = truth.as_ref()?;
    let truth_k = labels.iter().max().map_or(0, |&m| m + 1);
    if truth_k != k {
        return None;
    }
    let truth = ClusterAssignment::from_zero_based(labels, k).ok()?;
    confusion_accuracy(assignment, &truth).ok()
}

fn write_outputs(
    cfg: &PipelineConfig,
    assignment: &ClusterAssignment,
    trace: &SolveTrace,
    report: &RunReport,
) -> Result<(), CliError> {
    let oerr = |what: &str, e: std::io::Error| {
        CliError::new(Stage::Output, format!("writing {what}: {e}"))
    };
    if let Some(path) = &cfg.out_assignments {
        let file = File::create(path).map_err(|e| oerr("assignments", e))?;
        assignment
            .write(BufWriter::new(file))
            .map_err(|e| oerr("assignments", e))?;
    }
    if let Some(path) = &cfg.out_trace {
        let file = File::create(path).map_err(|e| oerr("trace", e))?;
        trace
            .write_csv(BufWriter::new(file))
            .map_err(|e| oerr("trace", e))?;
    }
    if let Some(path) = &cfg.out_report {
        let file = File::create(path).map_err(|e| oerr("report", e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, report)
            .map_err(|e| CliError::new(Stage::Output, format!("serializing report: {e}")))?;
        writeln!(w).map_err(|e| oerr("report", e))?;
    }
    Ok(())
}

/// Runs the full pipeline and returns the report that was serialized.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let t0 = Instant::now();
    let ingested = ingest(cfg)?;
    let io_millis = t0.elapsed().as_millis();

    if cfg.mode == Mode::Bench {
        return run_bench(cfg, &ingested, io_millis);
    }

    let ctx = KernelContext::new(cfg.threads)
        .map_err(|e| CliError::new(Stage::Config, e.to_string()))?;
    let (stages, trace) = solve_stage(&ctx, &ingested.graph, cfg, cfg.mode)?;
    let solve_millis: Vec<(f64, f64)> = trace.stages.iter().map(|s| (s.p, s.millis)).collect();

    let t2 = Instant::now();
    let selected = select_partition(&ctx, &ingested.graph, &stages, cfg)?;
    let kmeans_millis = t2.elapsed().as_millis();

    let t3 = Instant::now();
    let accuracy = score_accuracy(&selected.assignment, &ingested.truth, cfg.k);
    let metrics_millis = t3.elapsed().as_millis();

    let u_final = &stages.last().expect("at least one stage").embedding;
    let final_objective = objective(&ctx, &ingested.graph, u_final)
        .map_err(|e| CliError::new(Stage::Solve, e.to_string()))?
        .value;

    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        results: Results {
            mode: cfg.mode.as_str().to_string(),
            graph: GraphStats {
                n: ingested.graph.n(),
                m: ingested.graph.m(),
                isolated: ingested.graph.isolated_nodes().len(),
            },
            k: cfg.k,
            p_final: if cfg.mode == Mode::BaselineP2 { 2.0 } else { cfg.p_final },
            p_sequence: trace.stages.iter().map(|s| s.p).collect(),
            seed: cfg.seed,
            hessian_mode: cfg.hessian_mode.to_string(),
            row_normalize: cfg.row_normalize,
            final_objective,
            outer_iterations: trace.iterations.len(),
            kmeans_sse: selected.sse,
            cluster_sizes: selected.assignment.sizes(),
            rcut: selected.rcut,
            rcut_per_p: selected.rcut_per_p,
            best_p: selected.best_p,
            accuracy,
            trace_path: cfg
                .out_trace
                .as_ref()
                .map(|p| p.display().to_string()),
            bench: None,
        },
        timing: Timing {
            threads: cfg.threads,
            io_millis,
            solve_millis,
            kmeans_millis,
            metrics_millis,
            bench_solve_millis: None,
            bench_normalized: None,
        },
    };
    write_outputs(cfg, &selected.assignment, &trace, &report)?;
    Ok(report)
}

/// Bench mode: repeats the solve stage at each thread count on the same
/// input and seed, refuses to report timings unless every per-level
/// embedding is bitwise identical, then discretizes once.
fn run_bench(
    cfg: &PipelineConfig,
    ingested: &Ingested,
    io_millis: u128,
) -> Result<RunReport, CliError> {
    let mut timings: Vec<(usize, u128)> = Vec::new();
    let mut first: Option<(Vec<StageEmbedding>, SolveTrace, Vec<u64>)> = None;
    for &threads in &cfg.bench_threads {
        let ctx = KernelContext::new(threads)
            .map_err(|e| CliError::new(Stage::Config, e.to_string()))?;
        let t = Instant::now();
        let (stages, trace) = solve_stage(&ctx, &ingested.graph, cfg, Mode::Cluster)?;
        timings.push((threads, t.elapsed().as_millis()));
        let bits: Vec<u64> = stages
            .iter()
            .flat_map(|s| s.embedding.columns())
            .flat_map(|c| c.as_slice().iter().map(|x| x.to_bits()))
            .collect();
        match &first {
            None => first = Some((stages, trace, bits)),
            Some((_, _, base)) => {
                if &bits != base {
                    return Err(CliError::new(
                        Stage::Determinism,
                        format!(
                            "solve output at {threads} threads diverges from the single-thread \
                             run; timings withheld"
                        ),
                    ));
                }
            }
        }
    }
    let (stages, trace, _) = first.expect("bench_threads is non-empty");

    let ctx = KernelContext::new(1).map_err(|e| CliError::new(Stage::Config, e.to_string()))?;
    let t2 = Instant::now();
    let selected = select_partition(&ctx, &ingested.graph, &stages, cfg)?;
    let kmeans_millis = t2.elapsed().as_millis();
    let t3 = Instant::now();
    let accuracy = score_accuracy(&selected.assignment, &ingested.truth, cfg.k);
    let metrics_millis = t3.elapsed().as_millis();
    let u_final = &stages.last().expect("at least one stage").embedding;
    let final_objective = objective(&ctx, &ingested.graph, u_final)
        .map_err(|e| CliError::new(Stage::Solve, e.to_string()))?
        .value;

    let base = timings[0].1.max(1) as f64;
    let normalized: Vec<(usize, f64)> = timings
        .iter()
        .map(|&(t, ms)| (t, ms.max(1) as f64 / base))
        .collect();

    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        results: Results {
            mode: Mode::Bench.as_str().to_string(),
            graph: GraphStats {
                n: ingested.graph.n(),
                m: ingested.graph.m(),
                isolated: ingested.graph.isolated_nodes().len(),
            },
            k: cfg.k,
            p_final: cfg.p_final,
            p_sequence: trace.stages.iter().map(|s| s.p).collect(),
            seed: cfg.seed,
            hessian_mode: cfg.hessian_mode.to_string(),
            row_normalize: cfg.row_normalize,
            final_objective,
            outer_iterations: trace.iterations.len(),
            kmeans_sse: selected.sse,
            cluster_sizes: selected.assignment.sizes(),
            rcut: selected.rcut,
            rcut_per_p: selected.rcut_per_p,
            best_p: selected.best_p,
            accuracy,
            trace_path: cfg.out_trace.as_ref().map(|p| p.display().to_string()),
            bench: Some(BenchResults {
                thread_counts: cfg.bench_threads.clone(),
                outputs_identical: true,
            }),
        },
        timing: Timing {
            threads: *cfg.bench_threads.last().expect("non-empty"),
            io_millis,
            solve_millis: trace.stages.iter().map(|s| (s.p, s.millis)).collect(),
            kmeans_millis,
            metrics_millis,
            bench_solve_millis: Some(timings),
            bench_normalized: Some(normalized),
        },
    };
    write_outputs(cfg, &selected.assignment, &trace, &report)?;
    Ok(report)
}
