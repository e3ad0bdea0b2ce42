//! The p-Laplacian Rayleigh-quotient model.
//!
//! For an embedding `U` with columns `u^1..u^k` and `p` in `(1, 2]`, the
//! objective is
//!
//! ```text
//! F_p(U) = sum_l A[l] / B[l]
//! A[l] = 1/2 * sum_{i,j} w_ij |u_i^l - u_j^l|^p
//! B[l] = ||u^l||_p^p
//! ```
//!
//! This module evaluates `F_p`, its Euclidean gradient, and a Hessian-vector
//! operator built from a per-column diagonal `D[l]` plus a sparse
//! off-diagonal matrix `Hoff[l]`, all expressed through the kernel set in
//! [`crate::algebra`].
//!
//! ```
//! use pspectral::algebra::{DenseVector, KernelContext};
//! use pspectral::graph::Graph;
//! use pspectral::model::{objective, p_laplacian_apply, Embedding};
//!
//! let ctx = KernelContext::new(1).unwrap();
//! let g = Graph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
//! // single unit edge, u = (1, -1): A = 1/2 * 2 * 2^2 = 4, B = 2, F = 2
//! let u = Embedding::new(vec![DenseVector::from_vec(vec![1.0, -1.0])], 2.0).unwrap();
//! assert_eq!(objective(&ctx, &g, &u).unwrap().value, 2.0);
//! // at p = 2 the operator is the familiar (D - W) u
//! let lu = p_laplacian_apply(&ctx, &g, &DenseVector::from_vec(vec![1.0, -1.0]), 2.0).unwrap();
//! assert_eq!(lu.as_slice(), &[2.0, -2.0]);
//! ```

mod hessian;
mod objective;

pub use hessian::{build_hessian_parts, euc_hessian_eta, HessianMode, HessianParts};
pub use objective::{euc_grad, objective, p_laplacian_apply, Objective};

use std::hash::{Hash, Hasher};

use crate::algebra::DenseVector;

/// Default cap for the singular `|.|^(p-2)` curvature factors.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("p = {0} outside the supported range (1, 2]")]
    InvalidP(f64),
    #[error("eps = {0} must be positive")]
    InvalidEps(f64),
    #[error("column {0} of the embedding is degenerate (zero p-norm)")]
    DegenerateEmbedding(usize),
    #[error("embedding columns must share one length; column {col} has {got}, expected {expected}")]
    ColumnLengthMismatch {
        col: usize,
        got: usize,
        expected: usize,
    },
    #[error("embedding must have at least one column")]
    EmptyEmbedding,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("hessian parts are stale: embedding or p changed since they were built")]
    StaleHessianParts,
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

pub(crate) fn check_p(p: f64) -> Result<(), ModelError> {
    if p > 1.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidP(p))
    }
}

/// Signed power map `phi_p(x) = |x|^(p-1) sign(x)`, the derivative kernel of
/// `|x|^p` up to the factor `p`. `phi_p(0) = 0`; `phi_2` is the identity.
pub fn phi_p(x: f64, p: f64) -> Result<f64, ModelError> {
    check_p(p)?;
    Ok(phi_unchecked(x, p))
}

#[inline]
pub(crate) fn phi_unchecked(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p == 2.0 {
        x
    } else {
        x.abs().powf(p - 1.0) * x.signum()
    }
}

/// `max(|x|, eps)^(p-2)`, the capped curvature factor.
#[inline]
pub(crate) fn capped_pow(x: f64, p: f64, eps: f64) -> f64 {
    if p == 2.0 {
        1.0
    } else {
        x.abs().max(eps).powf(p - 2.0)
    }
}

/// `k` dense columns of length `n` plus the current `p`.
///
/// Columns are stored as separate vectors (row-of-vectors layout) so each
/// per-column operator application is a plain length-`n` vector against an
/// `n x n` matrix.
#[derive(Debug, Clone)]
pub struct Embedding {
    columns: Vec<DenseVector<f64>>,
    p: f64,
}

impl Embedding {
    pub fn new(columns: Vec<DenseVector<f64>>, p: f64) -> Result<Self, ModelError> {
        check_p(p)?;
        let expected = columns.first().ok_or(ModelError::EmptyEmbedding)?.len();
        for (col, c) in columns.iter().enumerate() {
            if c.len() != expected {
                return Err(ModelError::ColumnLengthMismatch {
                    col,
                    got: c.len(),
                    expected,
                });
            }
        }
        Ok(Embedding { columns, p })
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn set_p(&mut self, p: f64) -> Result<(), ModelError> {
        check_p(p)?;
        self.p = p;
        Ok(())
    }

    pub fn columns(&self) -> &[DenseVector<f64>] {
        &self.columns
    }

    pub fn column(&self, l: usize) -> &DenseVector<f64> {
        &self.columns[l]
    }

    pub fn into_columns(self) -> Vec<DenseVector<f64>> {
        self.columns
    }

    /// Row `i` across all columns; the point fed to k-means for node `i`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Hash of the exact bit patterns of all entries and `p`. Hessian parts
    /// carry this value to detect stale reuse after the embedding moved.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.p.to_bits().hash(&mut h);
        self.k().hash(&mut h);
        for c in &self.columns {
            for &x in c.as_slice() {
                x.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    /// Largest deviation of the column Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let k = self.k();
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in a..k {
                let dot: f64 = self.columns[a]
                    .as_slice()
                    .iter()
                    .zip(self.columns[b].as_slice())
                    .map(|(&x, &y)| x * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}
