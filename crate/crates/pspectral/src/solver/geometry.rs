//! Grassmann geometry: horizontal projection, QR retraction, seeded
//! orthonormal initialization.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{DenseVector, KernelContext};
use crate::graph::Graph;
use crate::model::Embedding;

use super::dense::{cross_gram, qr_thin, subtract_mixed, Tangent};
use super::SolverError;

/// Orthonormality slack accepted on solver inputs and re-checked on every
/// outer iteration.
pub(crate) const ORTHO_TOL: f64 = 1e-10;

pub(crate) fn require_orthonormal(u: &Embedding, context: &'static str) -> Result<(), SolverError> {
    let deviation = u.gram_deviation();
    if deviation > ORTHO_TOL {
        return Err(SolverError::NotOrthonormal { context, deviation });
    }
    Ok(())
}

/// Projects `g` onto the horizontal space at `u`: `P(G) = G - U (U' G)`.
pub fn project_tangent(
    ctx: &KernelContext,
    u: &Embedding,
    g: &Tangent,
) -> Result<Tangent, SolverError> {
    require_orthonormal(u, "project_tangent")?;
    if g.len() != u.k() {
        return Err(SolverError::ShapeMismatch {
            expected: u.k(),
            got: g.len(),
        });
    }
    let m = cross_gram(ctx, u.columns(), g);
    Ok(subtract_mixed(ctx, g, u.columns(), &m))
}

/// QR retraction: the Q factor of `U + xi` with positive diagonal in R.
///
/// `retract(U, 0) = U` exactly. Rank deficiency of `U + xi` surfaces as an
/// error for the trust-region logic to treat as a rejected step.
pub fn retract(u: &Embedding, xi: &Tangent) -> Result<Embedding, SolverError> {
    if xi.len() != u.k() {
        return Err(SolverError::ShapeMismatch {
            expected: u.k(),
            got: xi.len(),
        });
    }
    if xi
        .iter()
        .all(|col| col.as_slice().iter().all(|&x| x == 0.0))
    {
        return Ok(u.clone());
    }
    let sums: Vec<DenseVector<f64>> = u
        .columns()
        .iter()
        .zip(xi)
        .map(|(uc, xc)| {
            DenseVector::from_vec(
                uc.as_slice()
                    .iter()
                    .zip(xc.as_slice())
                    .map(|(&a, &b)| a + b)
                    .collect(),
            )
        })
        .collect();
    let q = qr_thin(&sums)?;
    Ok(Embedding::new(q, u.p())?)
}

/// Re-orthonormalizes an embedding in place via thin QR; used when warm
/// starting the next continuation stage.
pub fn reorthonormalize(u: &Embedding) -> Result<Embedding, SolverError> {
    let q = qr_thin(u.columns())?;
    Ok(Embedding::new(q, u.p())?)
}

/// Seeded orthonormal start: QR of an `n x k` standard Gaussian sample.
/// Deterministic per seed; different seeds give different subspaces.
pub fn init_p2(g: &Graph, k: usize, seed: u64) -> Result<Embedding, SolverError> {
    let n = g.n();
    if k >= n {
        return Err(SolverError::RankTooLarge { k, n });
    }
    if k == 0 {
        return Err(SolverError::InvalidConfig("k must be at least 1".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<DenseVector<f64>> = (0..k)
        .map(|_| {
            DenseVector::from_vec(
                (0..n)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect::<Vec<f64>>(),
            )
        })
        .collect();
    let q = qr_thin(&cols)?;
    Ok(Embedding::new(q, 2.0)?)
}
