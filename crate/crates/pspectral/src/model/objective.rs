//! Objective evaluation, the p-Laplacian operator, and the Euclidean
//! gradient.

use rayon::prelude::*;

use crate::algebra::{apply, ewise_apply, fold, DenseVector, KernelContext};
use crate::graph::Graph;

use super::{check_p, phi_unchecked, Embedding, ModelError};

/// Objective value with its per-column numerator/denominator terms.
#[derive(Debug, Clone)]
pub struct Objective {
    pub value: f64,
    /// Per column: `(A[l], B[l])`.
    pub terms: Vec<(f64, f64)>,
}

/// Applies the graph p-Laplacian: `result_i = sum_j w_ij phi_p(u_i - u_j)`.
///
/// At `p = 2` this is `(D - W) u` with `D` the degree diagonal.
pub fn p_laplacian_apply(
    ctx: &KernelContext,
    g: &Graph,
    u: &DenseVector<f64>,
    p: f64,
) -> Result<DenseVector<f64>, ModelError> {
    check_p(p)?;
    if u.len() != g.n() {
        return Err(ModelError::Algebra(
            crate::algebra::AlgebraError::ShapeMismatch {
                expected: g.n(),
                got: u.len(),
            },
        ));
    }
    let a = g.adjacency();
    let out: Vec<f64> = ctx.install(|| {
        (0..g.n())
            .into_par_iter()
            .map(|i| {
                let ui = u[i];
                let mut acc = 0.0;
                for (j, w) in a.row(i) {
                    acc += w * phi_unchecked(ui - u[j], p);
                }
                acc
            })
            .collect()
    });
    Ok(DenseVector::from_vec(out))
}

/// Per-column numerator `A[l] = 1/2 sum_{i,j} w_ij |u_i - u_j|^p`.
/// Both triangles are stored, so summing every entry and halving is exact.
pub(crate) fn numerator(ctx: &KernelContext, g: &Graph, u: &DenseVector<f64>, p: f64) -> f64 {
    let a = g.adjacency();
    let row_sums: Vec<f64> = ctx.install(|| {
        (0..g.n())
            .into_par_iter()
            .map(|i| {
                let ui = u[i];
                let mut acc = 0.0;
                for (j, w) in a.row(i) {
                    acc += w * (ui - u[j]).abs().powf(p);
                }
                acc
            })
            .collect()
    });
    0.5 * row_sums.iter().sum::<f64>()
}

/// Per-column denominator `B[l] = ||u||_p^p`, via `apply` then `fold`.
pub(crate) fn denominator(ctx: &KernelContext, u: &DenseVector<f64>, p: f64) -> f64 {
    let powed = apply(ctx, u, |x: f64| x.abs().powf(p));
    fold(ctx, &powed, |a, b| a + b, 0.0)
}

/// Evaluates `F_p(U) = sum_l A[l] / B[l]`.
pub fn objective(ctx: &KernelContext, g: &Graph, u: &Embedding) -> Result<Objective, ModelError> {
    let p = u.p();
    let mut terms = Vec::with_capacity(u.k());
    let mut value = 0.0;
    for (l, col) in u.columns().iter().enumerate() {
        if col.len() != g.n() {
            return Err(ModelError::Algebra(
                crate::algebra::AlgebraError::ShapeMismatch {
                    expected: g.n(),
                    got: col.len(),
                },
            ));
        }
        let b = denominator(ctx, col, p);
        if b == 0.0 {
            return Err(ModelError::DegenerateEmbedding(l));
        }
        let a = numerator(ctx, g, col, p);
        if !a.is_finite() || !b.is_finite() {
            return Err(ModelError::NonFinite("objective"));
        }
        value += a / b;
        terms.push((a, b));
    }
    Ok(Objective { value, terms })
}

/// Euclidean gradient of `F_p`, one vector per column:
///
/// ```text
/// grad^l = (p / B[l]) * (Delta_p u^l - (A[l] / B[l]) * phi_p(u^l))
/// ```
///
/// Each term of the objective is homogeneous of degree zero, so the gradient
/// is orthogonal to its own column.
pub fn euc_grad(
    ctx: &KernelContext,
    g: &Graph,
    u: &Embedding,
) -> Result<Vec<DenseVector<f64>>, ModelError> {
    let p = u.p();
    let obj = objective(ctx, g, u)?;
    let mut grads = Vec::with_capacity(u.k());
    for (l, col) in u.columns().iter().enumerate() {
        let (a, b) = obj.terms[l];
        let dp = p_laplacian_apply(ctx, g, col, p)?;
        let phi = apply(ctx, col, |x: f64| phi_unchecked(x, p));
        let ratio = a / b;
        let scale = p / b;
        let grad = ewise_apply(ctx, &dp, &phi, move |d, f| scale * (d - ratio * f))?;
        if grad.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(ModelError::NonFinite("gradient"));
        }
        grads.push(grad);
    }
    Ok(grads)
}
