//! Small dense helpers for the solver: tangent-space inner products, axpy
//! updates, and thin QR. `k` is small, so the `k x k` and `n x k` products
//! live here rather than in the kernel layer; reductions reuse the kernels'
//! fixed-order contract so results stay worker-count independent.

use crate::algebra::{ewise_apply, fold, DenseVector, KernelContext};

use super::SolverError;

/// A tangent direction: one vector per embedding column.
pub type Tangent = Vec<DenseVector<f64>>;

pub(crate) fn dot(ctx: &KernelContext, u: &DenseVector<f64>, v: &DenseVector<f64>) -> f64 {
    let prod = ewise_apply(ctx, u, v, |a, b| a * b).expect("equal lengths");
    fold(ctx, &prod, |a, b| a + b, 0.0)
}

/// Inner product on the tangent space: sum of per-column dots.
pub(crate) fn tdot(ctx: &KernelContext, xs: &Tangent, ys: &Tangent) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| dot(ctx, x, y)).sum()
}

pub(crate) fn tnorm(ctx: &KernelContext, xs: &Tangent) -> f64 {
    tdot(ctx, xs, xs).sqrt()
}

/// `ys + alpha * xs`, column by column.
pub(crate) fn taxpy(ctx: &KernelContext, alpha: f64, xs: &Tangent, ys: &Tangent) -> Tangent {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| ewise_apply(ctx, y, x, move |b, a| b + alpha * a).expect("equal lengths"))
        .collect()
}

pub(crate) fn tscale(ctx: &KernelContext, alpha: f64, xs: &Tangent) -> Tangent {
    xs.iter()
        .map(|x| crate::algebra::apply(ctx, x, move |a: f64| alpha * a))
        .collect()
}

pub(crate) fn tzeros(n: usize, k: usize) -> Tangent {
    (0..k).map(|_| DenseVector::filled(n, 0.0)).collect()
}

/// `M[a][b] = <us[a], vs[b]>`.
pub(crate) fn cross_gram(
    ctx: &KernelContext,
    us: &[DenseVector<f64>],
    vs: &[DenseVector<f64>],
) -> Vec<Vec<f64>> {
    us.iter()
        .map(|u| vs.iter().map(|v| dot(ctx, u, v)).collect())
        .collect()
}

/// `vs - us * m`: column `b` of the result is `vs[b] - sum_a m[a][b] us[a]`.
pub(crate) fn subtract_mixed(
    ctx: &KernelContext,
    vs: &Tangent,
    us: &[DenseVector<f64>],
    m: &[Vec<f64>],
) -> Tangent {
    (0..vs.len())
        .map(|b| {
            let mut col = vs[b].clone();
            for (a, u) in us.iter().enumerate() {
                let coeff = m[a][b];
                if coeff != 0.0 {
                    col = ewise_apply(ctx, &col, u, move |c, x| c - coeff * x)
                        .expect("equal lengths");
                }
            }
            col
        })
        .collect()
}

/// Thin QR of the `n x k` matrix whose columns are `cols`, returning the Q
/// factor with the sign convention `R_ii > 0`. Householder reflections keep
/// the columns orthonormal to machine precision.
pub(crate) fn qr_thin(
    cols: &[DenseVector<f64>],
) -> Result<Vec<DenseVector<f64>>, SolverError> {
    let k = cols.len();
    let n = cols[0].len();
    if k > n {
        return Err(SolverError::RankTooLarge { k, n });
    }
    let mut a: Vec<Vec<f64>> = cols.iter().map(|c| c.as_slice().to_vec()).collect();
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(k);
    let mut rdiag = vec![0.0f64; k];

    for j in 0..k {
        let norm = a[j][j..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < f64::EPSILON * (n as f64) {
            return Err(SolverError::RankDeficient { column: j });
        }
        let alpha = if a[j][j] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        rdiag[j] = alpha;
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(j + 1) {
                let w = 2.0 * v.iter().zip(&col[j..]).map(|(x, y)| x * y).sum::<f64>() / vnorm2;
                for (vi, ci) in v.iter().zip(col[j..].iter_mut()) {
                    *ci -= w * vi;
                }
            }
        }
        reflectors.push((v, vnorm2));
    }

    let mut q = Vec::with_capacity(k);
    for j in 0..k {
        let mut col = vec![0.0f64; n];
        col[j] = 1.0;
        for t in (0..=j.min(k - 1)).rev() {
            let (v, vnorm2) = &reflectors[t];
            if *vnorm2 > 0.0 {
                let w = 2.0 * v.iter().zip(&col[t..]).map(|(x, y)| x * y).sum::<f64>() / vnorm2;
                for (vi, ci) in v.iter().zip(col[t..].iter_mut()) {
                    *ci -= w * vi;
                }
            }
        }
        // Flip so the implied R has a positive diagonal.
        if rdiag[j] < 0.0 {
            for x in &mut col {
                *x = -*x;
            }
        }
        q.push(DenseVector::from_vec(col));
    }
    Ok(q)
}
