//! Hessian-vector operator in the diagonal / off-diagonal split.
//!
//! For each column `l` the sparse-mode Hessian is
//!
//! ```text
//! H^l = HessA / B  -  (A / B^2) * HessB
//! HessA = p(p-1) * Laplacian of modified weights  w~_ij = w_ij * cap(|u_i - u_j|, eps)^(p-2)
//! HessB = p(p-1) * diag(cap(|u_i|, eps)^(p-2))
//! ```
//!
//! stored as `D[l] = diag(H^l)` and `Hoff[l] = diag(H^l) - H^l` (the negated
//! off-diagonal part, which has the sparsity pattern of `W`). Applying the
//! operator is then one `vxm` plus two `eWiseApply` per column. Full mode
//! additionally carries the gradients of numerator and denominator and
//! applies the dense rank-two quotient correction functionally:
//!
//! ```text
//! H_full = H_sparse - (gA gB' + gB gA') / B^2 + 2 A gB gB' / B^3
//! ```

use crate::algebra::{ewise_apply, fold, vxm, DenseVector, KernelContext, PlusTimes, SparseMatrix};
use crate::graph::Graph;

use super::objective::objective;
use super::{capped_pow, phi_unchecked, Embedding, ModelError};
use super::p_laplacian_apply;

/// Which Hessian the operator realizes.
///
/// `Sparse` is the diagonal-plus-sparse representation (no dense quotient
/// terms, which cannot live in a sparse container). `Full` adds the rank-two
/// correction and matches finite differences of the gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianMode {
    Sparse,
    Full,
}

impl std::fmt::Display for HessianMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HessianMode::Sparse => write!(f, "sparse"),
            HessianMode::Full => write!(f, "full"),
        }
    }
}

/// Per-column pieces of the Hessian operator, rebuilt once per outer Newton
/// iteration and reused across all inner CG iterations.
#[derive(Debug, Clone)]
pub struct HessianParts {
    cols: Vec<ColParts>,
    mode: HessianMode,
    fingerprint: u64,
}

#[derive(Debug, Clone)]
struct ColParts {
    /// `diag(H^l)`.
    d: DenseVector<f64>,
    /// `diag(H^l) - H^l`, pattern of `W`, zero diagonal not stored.
    hoff: SparseMatrix<f64>,
    a: f64,
    b: f64,
    /// `gA = p * Delta_p u^l` (full mode only).
    g_a: Option<DenseVector<f64>>,
    /// `gB = p * phi_p(u^l)` (full mode only).
    g_b: Option<DenseVector<f64>>,
}

impl HessianParts {
    pub fn mode(&self) -> HessianMode {
        self.mode
    }

    /// Fingerprint of the `(U, p)` the parts were built from.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn diag(&self, l: usize) -> &DenseVector<f64> {
        &self.cols[l].d
    }

    pub fn off_diag(&self, l: usize) -> &SparseMatrix<f64> {
        &self.cols[l].hoff
    }

    pub fn terms(&self, l: usize) -> (f64, f64) {
        (self.cols[l].a, self.cols[l].b)
    }
}

/// Builds `D[l]` and `Hoff[l]` (plus full-mode vectors) for every column.
pub fn build_hessian_parts(
    ctx: &KernelContext,
    g: &Graph,
    u: &Embedding,
    mode: HessianMode,
    eps: f64,
) -> Result<HessianParts, ModelError> {
    if !(eps > 0.0) {
        return Err(ModelError::InvalidEps(eps));
    }
    let p = u.p();
    let obj = objective(ctx, g, u)?;
    let pp1 = p * (p - 1.0);
    let mut cols = Vec::with_capacity(u.k());
    for (col, &(a, b)) in u.columns().iter().zip(&obj.terms) {
        let scale = pp1 / b;

        // Off-diagonal entries: scale * w~_ij; modified-weight row sums feed
        // the diagonal of HessA's Laplacian.
        let hoff = g
            .adjacency()
            .map_values(|i, j, w| scale * w * capped_pow(col[i] - col[j], p, eps));
        let mut d = DenseVector::filled(g.n(), 0.0);
        for i in 0..g.n() {
            let row_sum: f64 = hoff.row(i).map(|(_, v)| v).sum();
            let hess_b = pp1 * capped_pow(col[i], p, eps);
            d[i] = row_sum - (a / (b * b)) * hess_b;
        }

        let (g_a, g_b) = match mode {
            HessianMode::Sparse => (None, None),
            HessianMode::Full => {
                let dp = p_laplacian_apply(ctx, g, col, p)?;
                let g_a = crate::algebra::apply(ctx, &dp, |x: f64| p * x);
                let g_b = crate::algebra::apply(ctx, col, |x: f64| p * phi_unchecked(x, p));
                (Some(g_a), Some(g_b))
            }
        };
        cols.push(ColParts {
            d,
            hoff,
            a,
            b,
            g_a,
            g_b,
        });
    }
    Ok(HessianParts {
        cols,
        mode,
        fingerprint: u.fingerprint(),
    })
}

/// Applies the Hessian operator: `r^l = H^l eta^l` for every column.
///
/// Follows the diagonal/off-diagonal recipe literally: one `vxm` under
/// plus-times, one elementwise multiply against `D[l]`, one elementwise
/// subtract. Errors with [`ModelError::StaleHessianParts`] when `u` no
/// longer matches the embedding the parts were built from.
pub fn euc_hessian_eta(
    ctx: &KernelContext,
    parts: &HessianParts,
    u: &Embedding,
    eta: &[DenseVector<f64>],
) -> Result<Vec<DenseVector<f64>>, ModelError> {
    if parts.fingerprint != u.fingerprint() {
        return Err(ModelError::StaleHessianParts);
    }
    if eta.len() != parts.cols.len() {
        return Err(ModelError::Algebra(
            crate::algebra::AlgebraError::ShapeMismatch {
                expected: parts.cols.len(),
                got: eta.len(),
            },
        ));
    }
    let mut out = Vec::with_capacity(eta.len());
    for (col, eta_l) in parts.cols.iter().zip(eta) {
        let v = vxm::<PlusTimes<f64>>(ctx, eta_l, &col.hoff)?;
        let w = ewise_apply(ctx, eta_l, &col.d, |x, d| x * d)?;
        let mut r = ewise_apply(ctx, &w, &v, |a, b| a - b)?;

        if parts.mode == HessianMode::Full {
            let g_a = col.g_a.as_ref().expect("full mode carries gA");
            let g_b = col.g_b.as_ref().expect("full mode carries gB");
            let (a, b) = (col.a, col.b);
            // <gB, eta> and <gA, eta> via eWiseApply + fold.
            let gb_eta = fold(ctx, &ewise_apply(ctx, g_b, eta_l, |x, y| x * y)?, |s, t| s + t, 0.0);
            let ga_eta = fold(ctx, &ewise_apply(ctx, g_a, eta_l, |x, y| x * y)?, |s, t| s + t, 0.0);
            let c_a = -gb_eta / (b * b);
            let c_b = -ga_eta / (b * b) + 2.0 * a * gb_eta / (b * b * b);
            let correction = ewise_apply(ctx, g_a, g_b, move |ga, gb| c_a * ga + c_b * gb)?;
            r = ewise_apply(ctx, &r, &correction, |x, y| x + y)?;
        }
        out.push(r);
    }
    Ok(out)
}
