//! Steihaug-Toint truncated conjugate gradient for the trust-region
//! subproblem: approximately minimize `<g, s> + 1/2 <s, H s>` over
//! `||s|| <= delta`.

use crate::algebra::KernelContext;

use super::dense::{taxpy, tdot, tnorm, tzeros, Tangent};
use super::SolverError;

/// Why the inner iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcgStatus {
    /// Residual tolerance met strictly inside the region.
    Interior,
    /// The CG step crossed the trust-region boundary; stopped at it.
    Boundary,
    /// Negative curvature encountered; moved to the boundary along it.
    NegativeCurvature,
    /// Iteration cap reached.
    MaxIters,
}

impl std::fmt::Display for TcgStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TcgStatus::Interior => "interior",
            TcgStatus::Boundary => "boundary",
            TcgStatus::NegativeCurvature => "negative-curvature",
            TcgStatus::MaxIters => "max-iters",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug)]
pub struct TcgOutcome {
    pub step: Tangent,
    pub status: TcgStatus,
    pub iters: usize,
    /// Model decrease `m(0) - m(step)`; nonnegative for every returned step.
    pub model_decrease: f64,
}

/// Positive root of `||s + tau d|| = delta`.
fn boundary_tau(ss: f64, sd: f64, dd: f64, delta: f64) -> f64 {
    let disc = (sd * sd + dd * (delta * delta - ss)).max(0.0);
    (-sd + disc.sqrt()) / dd
}

/// Runs truncated CG. `hess` must be (numerically) symmetric on the tangent
/// space; indefiniteness is handled through the negative-curvature exit.
///
/// Residual stop: `||r|| <= ||g|| * min(kappa, ||g||^theta)`.
pub fn truncated_cg(
    ctx: &KernelContext,
    mut hess: impl FnMut(&Tangent) -> Result<Tangent, SolverError>,
    grad: &Tangent,
    delta: f64,
    kappa: f64,
    theta: f64,
    max_iters: usize,
) -> Result<TcgOutcome, SolverError> {
    let n = grad[0].len();
    let k = grad.len();
    let grad_norm = tnorm(ctx, grad);
    let mut step = tzeros(n, k);
    if grad_norm == 0.0 {
        return Ok(TcgOutcome {
            step,
            status: TcgStatus::Interior,
            iters: 0,
            model_decrease: 0.0,
        });
    }
    let tol = grad_norm * kappa.min(grad_norm.powf(theta));

    let mut residual = grad.clone();
    let mut direction = taxpy(ctx, -2.0, grad, grad); // -grad
    let mut rr = grad_norm * grad_norm;
    let mut status = TcgStatus::MaxIters;
    let mut iters = 0;

    for _ in 0..max_iters {
        iters += 1;
        let hd = hess(&direction)?;
        let dhd = tdot(ctx, &direction, &hd);
        let ss = tdot(ctx, &step, &step);
        let sd = tdot(ctx, &step, &direction);
        let dd = tdot(ctx, &direction, &direction);
        if dhd <= 0.0 {
            let tau = boundary_tau(ss, sd, dd, delta);
            step = taxpy(ctx, tau, &direction, &step);
            status = TcgStatus::NegativeCurvature;
            break;
        }
        let alpha = rr / dhd;
        let ss_next = ss + 2.0 * alpha * sd + alpha * alpha * dd;
        if ss_next.sqrt() >= delta {
            let tau = boundary_tau(ss, sd, dd, delta);
            step = taxpy(ctx, tau, &direction, &step);
            status = TcgStatus::Boundary;
            break;
        }
        step = taxpy(ctx, alpha, &direction, &step);
        residual = taxpy(ctx, alpha, &hd, &residual);
        let rr_next = tdot(ctx, &residual, &residual);
        if rr_next.sqrt() <= tol {
            status = TcgStatus::Interior;
            break;
        }
        let beta = rr_next / rr;
        rr = rr_next;
        // d <- -r + beta d
        direction = {
            let scaled = super::dense::tscale(ctx, beta, &direction);
            taxpy(ctx, -1.0, &residual, &scaled)
        };
    }

    // Model decrease evaluated directly; one extra operator application.
    let hs = hess(&step)?;
    let model_decrease = -(tdot(ctx, grad, &step) + 0.5 * tdot(ctx, &step, &hs));
    Ok(TcgOutcome {
        step,
        status,
        iters,
        model_decrease,
    })
}
