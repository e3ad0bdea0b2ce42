//! Versioned JSON report schema.
//!
//! The report splits into a `results` section, which is a pure function of
//! `(input, config, seed)` and is byte-stable across thread counts, and a
//! `timing` section, which carries wall-clock measurements and is the only
//! part allowed to differ between otherwise identical runs.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub schema_version: u32,
    pub results: Results,
    pub timing: Timing,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Results {
    pub mode: String,
    pub graph: GraphStats,
    pub k: usize,
    pub p_final: f64,
    pub p_sequence: Vec<f64>,
    pub seed: u64,
    pub hessian_mode: String,
    pub row_normalize: bool,
    pub final_objective: f64,
    pub outer_iterations: usize,
    pub kmeans_sse: f64,
    pub cluster_sizes: Vec<usize>,
    pub rcut: f64,
    /// RCut of the k-means partition at each continuation level `(p, rcut)`.
    /// The reported partition is the best of these; `best_p` names the level
    /// it came from.
    pub rcut_per_p: Vec<(f64, f64)>,
    pub best_p: f64,
    /// Ground-truth agreement, present only for synthetic inputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    /// Path of the CSV iteration trace, when one was written.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
    /// Per-thread-count scaling numbers, bench mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchResults>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub isolated: usize,
}

/// Scaling summary: runtimes normalized against the single-thread run, as in
/// a strong-scaling plot. Timings themselves live in `timing`; this section
/// records only which thread counts were verified bitwise identical.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct BenchResults {
    pub thread_counts: Vec<usize>,
    pub outputs_identical: bool,
}

#[derive(Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Timing {
    /// Worker count the run used. Lives here rather than in `results` so
    /// that runs differing only in worker count stay byte-identical there.
    pub threads: usize,
    pub io_millis: u128,
    /// One entry per continuation stage `(p, millis)`.
    pub solve_millis: Vec<(f64, f64)>,
    pub kmeans_millis: u128,
    pub metrics_millis: u128,
    /// Bench mode: solve-stage wall clock per thread count, absolute and
    /// normalized versus the single-thread run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench_solve_millis: Option<Vec<(usize, u128)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench_normalized: Option<Vec<(usize, f64)>>,
}
