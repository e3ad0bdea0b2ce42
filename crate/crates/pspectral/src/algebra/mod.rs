//! Semiring-parameterized sparse/dense containers and parallel kernels.
//!
//! This is the substrate every heavy operation in the crate runs on: a small
//! GraphBLAS-flavored kernel set (`vxm`, `eWiseApply`, `apply`, `fold`, `set`)
//! over [`SparseMatrix`] and [`DenseVector`], parameterized by a [`Semiring`].
//! Parallelism is over output indices only and reduction order is fixed, so
//! every kernel is bitwise reproducible across worker counts.
//!
//! ```
//! use pspectral::algebra::{vxm, DenseVector, KernelContext, MinPlus, PlusTimes, SparseMatrix};
//!
//! let ctx = KernelContext::new(2).unwrap();
//! let a = SparseMatrix::from_triples(3, 3, &[(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)]).unwrap();
//! let v = DenseVector::from_vec(vec![1.0, 10.0, 100.0]);
//! let plus_times = vxm::<PlusTimes<f64>>(&ctx, &v, &a).unwrap();
//! assert_eq!(plus_times.as_slice(), &[300.0, 1.0, 20.0]);
//! // same data under the shortest-path algebra; absent entries stay absent
//! let hops = vxm::<MinPlus>(&ctx, &v, &a).unwrap();
//! assert_eq!(hops.as_slice(), &[103.0, 2.0, 12.0]);
//! ```

mod context;
mod dense;
mod kernels;
mod semiring;
mod sparse;

pub use context::KernelContext;
pub use dense::DenseVector;
pub use kernels::{apply, ewise_apply, fold, set, vxm};
pub use semiring::{MinPlus, PlusTimes, Semiring};
pub use sparse::SparseMatrix;

/// Errors from container construction and kernel invocation.
#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("index ({row}, {col}) out of range for {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("worker count must be at least 1")]
    InvalidThreadCount,
    #[error("failed to build worker pool: {0}")]
    ThreadPool(String),
}
