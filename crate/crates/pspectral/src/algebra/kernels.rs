//! The kernel set: `vxm`, `eWiseApply`, `apply`, `fold`, `set`.
//!
//! Every kernel parallelizes across output indices and keeps each output's
//! reduction in ascending index order, so results do not depend on the
//! worker count.

use rayon::prelude::*;

use super::{AlgebraError, DenseVector, KernelContext, Semiring, SparseMatrix};

/// Reductions run over fixed chunks of this many indices; chunk partials are
/// combined in ascending chunk order. The boundaries never depend on the
/// worker count, so folds are reproducible. Inputs shorter than one chunk
/// reduce strictly left to right.
const FOLD_CHUNK: usize = 8192;

/// Row-vector times matrix under a semiring:
/// `result[j] = fold_add_i mul(v[i], A[i, j])`, fold seeded with `zero`.
///
/// Rows with no stored entry contribute nothing (absent is absent, not
/// `zero`; this matters for semirings like min-plus whose `mul` does not
/// annihilate).
pub fn vxm<R: Semiring>(
    ctx: &KernelContext,
    v: &DenseVector<R::Scalar>,
    a: &SparseMatrix<R::Scalar>,
) -> Result<DenseVector<R::Scalar>, AlgebraError> {
    if v.len() != a.nrows() {
        return Err(AlgebraError::ShapeMismatch {
            expected: a.nrows(),
            got: v.len(),
        });
    }
    let out: Vec<R::Scalar> = ctx.install(|| {
        (0..a.ncols())
            .into_par_iter()
            .map(|j| {
                let mut acc = R::zero();
                for (i, aij) in a.col(j) {
                    acc = R::add(acc, R::mul(v[i], aij));
                }
                acc
            })
            .collect()
    });
    Ok(DenseVector::from_vec(out))
}

/// Elementwise combination: `result[i] = op(u[i], v[i])`.
pub fn ewise_apply<T: Copy + Send + Sync>(
    ctx: &KernelContext,
    u: &DenseVector<T>,
    v: &DenseVector<T>,
    op: impl Fn(T, T) -> T + Send + Sync,
) -> Result<DenseVector<T>, AlgebraError> {
    if u.len() != v.len() {
        return Err(AlgebraError::ShapeMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let out: Vec<T> = ctx.install(|| {
        u.as_slice()
            .par_iter()
            .zip(v.as_slice().par_iter())
            .map(|(&a, &b)| op(a, b))
            .collect()
    });
    Ok(DenseVector::from_vec(out))
}

/// Elementwise map: `result[i] = f(u[i])`.
pub fn apply<T: Copy + Send + Sync, U: Copy + Send + Sync>(
    ctx: &KernelContext,
    u: &DenseVector<T>,
    f: impl Fn(T) -> U + Send + Sync,
) -> DenseVector<U> {
    let out: Vec<U> = ctx.install(|| u.as_slice().par_iter().map(|&a| f(a)).collect());
    DenseVector::from_vec(out)
}

/// Index-ordered reduction of `u` under a monoid `(add, identity)`.
pub fn fold<T: Copy + Send + Sync>(
    ctx: &KernelContext,
    u: &DenseVector<T>,
    add: impl Fn(T, T) -> T + Send + Sync,
    identity: T,
) -> T {
    let slice = u.as_slice();
    if slice.len() <= FOLD_CHUNK {
        return slice.iter().fold(identity, |acc, &x| add(acc, x));
    }
    let partials: Vec<T> = ctx.install(|| {
        slice
            .par_chunks(FOLD_CHUNK)
            .map(|chunk| chunk.iter().fold(identity, |acc, &x| add(acc, x)))
            .collect()
    });
    partials.into_iter().fold(identity, |acc, p| add(acc, p))
}

/// Overwrites every entry of `u` with `s`.
pub fn set<T: Copy>(u: &mut DenseVector<T>, s: T) {
    for x in u.as_mut_slice() {
        *x = s;
    }
}
