//! Kernel execution context.

use super::AlgebraError;

/// Owns the worker pool used by all parallel kernels.
///
/// Kernels parallelize over output indices only; the per-output reduction
/// order is fixed, so results are identical for any worker count. A context
/// is constructed once (worker count surfaced as `--threads` on the CLI) and
/// shared by reference.
pub struct KernelContext {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl KernelContext {
    pub fn new(threads: usize) -> Result<Self, AlgebraError> {
        if threads == 0 {
            return Err(AlgebraError::InvalidThreadCount);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| AlgebraError::ThreadPool(e.to_string()))?;
        Ok(KernelContext { pool, threads })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Runs `f` inside this context's worker pool.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}
