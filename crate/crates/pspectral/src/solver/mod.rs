//! Riemannian trust-region Newton on the Grassmann manifold with truncated
//! CG inner solves, plus the continuation driver over decreasing `p`.
//!
//! ```
//! use pspectral::algebra::KernelContext;
//! use pspectral::graph::Graph;
//! use pspectral::model::objective;
//! use pspectral::solver::{continuation_solve, ContinuationSchedule, SolverConfig};
//!
//! let ctx = KernelContext::new(1).unwrap();
//! // path on 3 nodes: the two smallest Laplacian eigenvalues are 0 and 1
//! let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
//! let schedule = ContinuationSchedule::new(2.0, 0.9).unwrap();
//! let cfg = SolverConfig { seed: 1, ..SolverConfig::default() };
//! let (u, trace) = continuation_solve(&ctx, &g, 2, &schedule, &cfg).unwrap();
//! let f = objective(&ctx, &g, &u).unwrap().value;
//! assert!((f - 1.0).abs() < 1e-6);
//! assert!(trace.accepted_f_monotone());
//! ```

mod dense;
mod geometry;
mod tcg;
mod trust_region;

pub use dense::Tangent;
pub use geometry::{init_p2, project_tangent, reorthonormalize, retract};
pub use tcg::{truncated_cg, TcgOutcome, TcgStatus};
pub use trust_region::{
    continuation_solve, continuation_solve_stages, trust_region_newton, StageEmbedding,
};

use serde::Serialize;

use crate::model::HessianMode;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("embedding is not orthonormal in {context} (gram deviation {deviation:.3e})")]
    NotOrthonormal {
        context: &'static str,
        deviation: f64,
    },
    #[error("expected {expected} tangent columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("k = {k} must be smaller than the node count n = {n}")]
    RankTooLarge { k: usize, n: usize },
    #[error("rank deficiency detected at column {column} during QR")]
    RankDeficient { column: usize },
    #[error("non-finite {what} at p = {p}; trace retained up to the failure")]
    NonFinite {
        what: &'static str,
        p: f64,
        trace: Box<SolveTrace>,
    },
    #[error("solve failed at p = {p}: {source}")]
    AtStage {
        p: f64,
        #[source]
        source: Box<SolverError>,
    },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// Trust-region Newton parameters. Every value the continuation driver does
/// not own lives here; all have documented defaults and every one is
/// surfaced on the CLI.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Riemannian gradient norm stop. `None` means the scale-aware default
    /// `1e-6 * sqrt(n * k)`.
    pub grad_tol: Option<f64>,
    /// Outer iteration cap per `p` stage.
    pub max_outer: usize,
    /// Initial trust radius.
    pub tr_delta0: f64,
    /// Trust radius cap.
    pub tr_delta_max: f64,
    /// Acceptance threshold for the ratio test; must lie in (0, 0.25).
    pub tr_rho_accept: f64,
    /// Truncated-CG residual factor.
    pub tcg_kappa: f64,
    /// Truncated-CG superlinear exponent.
    pub tcg_theta: f64,
    /// Inner iteration cap. `None` means `2 * n * k`.
    pub tcg_max_iters: Option<usize>,
    /// Which Hessian the inner solve sees.
    pub hessian_mode: HessianMode,
    /// Cap for the singular curvature factors.
    pub eps: f64,
    /// Seed for the `p = 2` initialization.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grad_tol: None,
            max_outer: 200,
            tr_delta0: 0.5,
            tr_delta_max: 32.0,
            tr_rho_accept: 0.1,
            tcg_kappa: 0.1,
            tcg_theta: 1.0,
            tcg_max_iters: None,
            hessian_mode: HessianMode::Sparse,
            eps: crate::model::DEFAULT_EPS,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tr_rho_accept > 0.0 && self.tr_rho_accept < 0.25) {
            return Err(SolverError::InvalidConfig(format!(
                "tr_rho_accept = {} outside (0, 0.25)",
                self.tr_rho_accept
            )));
        }
        if let Some(t) = self.grad_tol {
            if !(t > 0.0) {
                return Err(SolverError::InvalidConfig(format!("grad_tol = {t} must be positive")));
            }
        }
        if !(self.tr_delta0 > 0.0 && self.tr_delta0 <= self.tr_delta_max) {
            return Err(SolverError::InvalidConfig(format!(
                "need 0 < tr_delta0 ({}) <= tr_delta_max ({})",
                self.tr_delta0, self.tr_delta_max
            )));
        }
        if !(self.eps > 0.0) {
            return Err(SolverError::InvalidConfig(format!("eps = {} must be positive", self.eps)));
        }
        if self.max_outer == 0 {
            return Err(SolverError::InvalidConfig("max_outer must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn effective_grad_tol(&self, n: usize, k: usize) -> f64 {
        self.grad_tol
            .unwrap_or_else(|| 1e-6 * ((n * k) as f64).sqrt())
    }

    pub(crate) fn effective_tcg_max(&self, n: usize, k: usize) -> usize {
        self.tcg_max_iters.unwrap_or(2 * n * k)
    }
}

/// Decreasing-`p` schedule: `p_0 = 2`, `p_{j+1} = max(p_final, factor * p_j)`.
#[derive(Debug, Clone)]
pub struct ContinuationSchedule {
    p_final: f64,
    factor: f64,
}

impl ContinuationSchedule {
    pub fn new(p_final: f64, factor: f64) -> Result<Self, SolverError> {
        if !(p_final > 1.0 && p_final <= 2.0) {
            return Err(SolverError::InvalidConfig(format!(
                "p_final = {p_final} outside (1, 2]"
            )));
        }
        if !(factor > 0.0 && factor < 1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "continuation factor = {factor} outside (0, 1)"
            )));
        }
        Ok(ContinuationSchedule { p_final, factor })
    }

    pub fn p_final(&self) -> f64 {
        self.p_final
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// The realized strictly decreasing sequence, starting at 2 and ending
    /// at `p_final`.
    pub fn sequence(&self) -> Vec<f64> {
        let mut seq = vec![2.0];
        let mut p = 2.0;
        while p > self.p_final {
            p = (self.factor * p).max(self.p_final);
            seq.push(p);
        }
        seq
    }
}

/// One outer trust-region iteration as recorded in the trace.
#[derive(Debug, Clone, Serialize)]
pub struct IterRecord {
    pub p: f64,
    pub iter: usize,
    pub f: f64,
    pub gradnorm: f64,
    pub delta: f64,
    pub tcg_iters: usize,
    pub accepted: bool,
    pub millis: f64,
}

/// Wall-clock time spent in one continuation stage.
#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub p: f64,
    pub outer_iters: usize,
    pub millis: f64,
}

/// Full per-iteration history of a solve.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveTrace {
    pub iterations: Vec<IterRecord>,
    pub stages: Vec<StageTiming>,
}

impl SolveTrace {
    /// Line-per-iteration CSV with a header row.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "p,iter,f,gradnorm,delta,tcg_iters,accepted,millis")?;
        for r in &self.iterations {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.p, r.iter, r.f, r.gradnorm, r.delta, r.tcg_iters, r.accepted, r.millis
            )?;
        }
        Ok(())
    }

    /// Compact JSON summary: per-stage outcomes plus final values.
    pub fn summary_json(&self) -> serde_json::Value {
        let last = self.iterations.last();
        serde_json::json!({
            "stages": self.stages,
            "outer_iterations": self.iterations.len(),
            "final_f": last.map(|r| r.f),
            "final_gradnorm": last.map(|r| r.gradnorm),
        })
    }

    /// Accepted objective values must never increase within a stage at a
    /// fixed `p`; used by tests and asserted during the solve.
    pub fn accepted_f_monotone(&self) -> bool {
        let mut last: Option<(f64, f64)> = None; // (p, f)
        for r in self.iterations.iter().filter(|r| r.accepted) {
            if let Some((p, f)) = last {
                if r.p == p && r.f > f {
                    return false;
                }
            }
            last = Some((r.p, r.f));
        }
        true
    }
}
