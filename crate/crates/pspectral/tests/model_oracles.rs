//! Objective, gradient, and Hessian checked against independent oracles:
//! central finite differences, naive dense assembly, and the linear-Laplacian
//! special case at p = 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pspectral::algebra::{DenseVector, KernelContext};
use pspectral::graph::Graph;
use pspectral::model::{
    build_hessian_parts, euc_grad, euc_hessian_eta, objective, p_laplacian_apply, Embedding,
    HessianMode, DEFAULT_EPS,
};
use pspectral::solver::{project_tangent, reorthonormalize};

/// Random connected weighted graph: a spanning path plus extra random edges.
fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges: Vec<(usize, usize, f64)> = (0..n - 1)
        .map(|i| (i, i + 1, rng.gen_range(0.2..2.0)))
        .collect();
    let extra = rng.gen_range(0..=(2 * n));
    for _ in 0..extra {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j && !edges.iter().any(|&(a, b, _)| (a.min(b), a.max(b)) == (i.min(j), i.max(j))) {
            edges.push((i.min(j), i.max(j), rng.gen_range(0.2..2.0)));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

fn random_embedding(rng: &mut ChaCha8Rng, n: usize, k: usize, p: f64) -> Embedding {
    let cols = (0..k)
        .map(|_| DenseVector::from_vec((0..n).map(|_| rng.sample(StandardNormal)).collect()))
        .collect();
    Embedding::new(cols, p).unwrap()
}

fn perturbed(u: &Embedding, l: usize, i: usize, h: f64) -> Embedding {
    let mut cols: Vec<DenseVector<f64>> = u.columns().to_vec();
    cols[l][i] += h;
    Embedding::new(cols, u.p()).unwrap()
}

#[test]
fn gradient_matches_central_finite_differences() {
    let ctx = KernelContext::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-5;
    let mut graphs = 0;
    for p in [1.2, 1.5, 1.8, 2.0] {
        for _ in 0..5 {
            let n = rng.gen_range(6..=50);
            let k = rng.gen_range(1..=4);
            let g = random_connected_graph(&mut rng, n);
            let u = random_embedding(&mut rng, n, k, p);
            let grad = euc_grad(&ctx, &g, &u).unwrap();

            let mut err_sq = 0.0;
            let mut norm_sq = 0.0;
            for l in 0..k {
                for i in 0..n {
                    let fp = objective(&ctx, &g, &perturbed(&u, l, i, h)).unwrap().value;
                    let fm = objective(&ctx, &g, &perturbed(&u, l, i, -h)).unwrap().value;
                    let fd = (fp - fm) / (2.0 * h);
                    err_sq += (fd - grad[l][i]).powi(2);
                    norm_sq += grad[l][i].powi(2);
                }
            }
            let rel = err_sq.sqrt() / norm_sq.sqrt().max(1.0);
            assert!(rel <= 1e-5, "p={p}, n={n}, k={k}: fd mismatch rel {rel:.3e}");
            graphs += 1;
        }
    }
    assert!(graphs >= 20);
}

#[test]
fn riemannian_gradient_is_tangent() {
    let ctx = KernelContext::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for p in [1.4, 2.0] {
        let n = 30;
        let k = 3;
        let g = random_connected_graph(&mut rng, n);
        let u = {
            let raw = random_embedding(&mut rng, n, k, p);
            reorthonormalize(&raw).unwrap()
        };
        let grad = euc_grad(&ctx, &g, &u).unwrap();
        let xi = project_tangent(&ctx, &u, &grad).unwrap();
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = (0..n).map(|i| u.column(a)[i] * xi[b][i]).sum();
                assert!(dot.abs() <= 1e-10, "U^T xi [{a}][{b}] = {dot:e}");
            }
        }
    }
}

/// Dense per-column Euclidean Hessian assembled with plain loops straight
/// from the quotient rule, independent of the operator code path.
fn dense_hessian_oracle(g: &Graph, u: &Embedding, l: usize, eps: f64, full: bool) -> Vec<Vec<f64>> {
    let n = g.n();
    let p = u.p();
    let col = u.column(l);
    let cap = |x: f64| {
        if p == 2.0 {
            1.0
        } else {
            x.abs().max(eps).powf(p - 2.0)
        }
    };
    let phi = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            x.abs().powf(p - 1.0) * x.signum()
        }
    };
    let mut a_num = 0.0;
    for (i, j, w) in g.edges() {
        a_num += w * (col[i] - col[j]).abs().powf(p);
    }
    let b_den: f64 = (0..n).map(|i| col[i].abs().powf(p)).sum();

    let mut h = vec![vec![0.0; n]; n];
    // Hess A = p (p-1) * Laplacian of the modified weights.
    for (i, j, w) in g.edges() {
        let wt = p * (p - 1.0) * w * cap(col[i] - col[j]);
        h[i][j] -= wt / b_den;
        h[j][i] -= wt / b_den;
        h[i][i] += wt / b_den;
        h[j][j] += wt / b_den;
    }
    // -(A / B^2) Hess B with Hess B diagonal.
    for i in 0..n {
        h[i][i] -= (a_num / (b_den * b_den)) * p * (p - 1.0) * cap(col[i]);
    }
    if full {
        let ga: Vec<f64> = {
            let mut v = vec![0.0; n];
            for (i, j, w) in g.edges() {
                v[i] += p * w * phi(col[i] - col[j]);
                v[j] += p * w * phi(col[j] - col[i]);
            }
            v
        };
        let gb: Vec<f64> = (0..n).map(|i| p * phi(col[i])).collect();
        for i in 0..n {
            for j in 0..n {
                h[i][j] += -(ga[i] * gb[j] + gb[i] * ga[j]) / (b_den * b_den)
                    + 2.0 * a_num * gb[i] * gb[j] / (b_den * b_den * b_den);
            }
        }
    }
    h
}

#[test]
fn hessian_operator_matches_dense_oracle() {
    let ctx = KernelContext::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for p in [1.3, 1.7, 2.0] {
        for mode in [HessianMode::Sparse, HessianMode::Full] {
            let n = rng.gen_range(8..=30);
            let k = rng.gen_range(1..=3);
            let g = random_connected_graph(&mut rng, n);
            let u = random_embedding(&mut rng, n, k, p);
            let parts = build_hessian_parts(&ctx, &g, &u, mode, DEFAULT_EPS).unwrap();
            let eta: Vec<DenseVector<f64>> = (0..k)
                .map(|_| {
                    DenseVector::from_vec((0..n).map(|_| rng.sample(StandardNormal)).collect())
                })
                .collect();
            let got = euc_hessian_eta(&ctx, &parts, &u, &eta).unwrap();
            for l in 0..k {
                let h = dense_hessian_oracle(&g, &u, l, DEFAULT_EPS, mode == HessianMode::Full);
                for i in 0..n {
                    let want: f64 = (0..n).map(|j| h[i][j] * eta[l][j]).sum();
                    let tol = 1e-12 * want.abs().max(1.0);
                    assert!(
                        (got[l][i] - want).abs() <= tol,
                        "p={p} {mode:?} col {l} row {i}: {} vs {want}",
                        got[l][i]
                    );
                }
            }
        }
    }
}

#[test]
fn full_hessian_matches_gradient_finite_differences() {
    let ctx = KernelContext::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let h = 1e-5;
    for p in [1.5, 1.9, 2.0] {
        let n = 20;
        let k = 2;
        let g = random_connected_graph(&mut rng, n);
        let u = random_embedding(&mut rng, n, k, p);
        let parts = build_hessian_parts(&ctx, &g, &u, HessianMode::Full, DEFAULT_EPS).unwrap();
        let eta: Vec<DenseVector<f64>> = (0..k)
            .map(|_| DenseVector::from_vec((0..n).map(|_| rng.sample(StandardNormal)).collect()))
            .collect();
        let got = euc_hessian_eta(&ctx, &parts, &u, &eta).unwrap();

        let shift = |s: f64| {
            let cols: Vec<DenseVector<f64>> = u
                .columns()
                .iter()
                .zip(&eta)
                .map(|(c, e)| {
                    DenseVector::from_vec((0..n).map(|i| c[i] + s * e[i]).collect())
                })
                .collect();
            Embedding::new(cols, p).unwrap()
        };
        let gp = euc_grad(&ctx, &g, &shift(h)).unwrap();
        let gm = euc_grad(&ctx, &g, &shift(-h)).unwrap();

        let mut err_sq = 0.0;
        let mut norm_sq = 0.0;
        for l in 0..k {
            for i in 0..n {
                let fd = (gp[l][i] - gm[l][i]) / (2.0 * h);
                err_sq += (fd - got[l][i]).powi(2);
                norm_sq += fd.powi(2);
            }
        }
        let rel = err_sq.sqrt() / norm_sq.sqrt().max(1.0);
        assert!(rel <= 1e-4, "p={p}: Hessian-vector fd mismatch rel {rel:.3e}");
    }
}

#[test]
fn hessian_operator_is_symmetric() {
    let ctx = KernelContext::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    for mode in [HessianMode::Sparse, HessianMode::Full] {
        let n = 25;
        let k = 3;
        let p = 1.6;
        let g = random_connected_graph(&mut rng, n);
        let u = random_embedding(&mut rng, n, k, p);
        let parts = build_hessian_parts(&ctx, &g, &u, mode, DEFAULT_EPS).unwrap();
        let rand_dir = |rng: &mut ChaCha8Rng| -> Vec<DenseVector<f64>> {
            (0..k)
                .map(|_| DenseVector::from_vec((0..n).map(|_| rng.sample(StandardNormal)).collect()))
                .collect()
        };
        let xi = rand_dir(&mut rng);
        let eta = rand_dir(&mut rng);
        let h_eta = euc_hessian_eta(&ctx, &parts, &u, &eta).unwrap();
        let h_xi = euc_hessian_eta(&ctx, &parts, &u, &xi).unwrap();
        let dot = |a: &[DenseVector<f64>], b: &[DenseVector<f64>]| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| (0..n).map(|i| x[i] * y[i]).sum::<f64>())
                .sum()
        };
        let lhs = dot(&xi, &h_eta);
        let rhs = dot(&eta, &h_xi);
        assert!(
            (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
            "{mode:?}: <xi,H eta>={lhs} vs <eta,H xi>={rhs}"
        );
    }
}

#[test]
fn objective_is_scale_invariant() {
    let ctx = KernelContext::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for p in [1.25, 1.75, 2.0] {
        let n = 40;
        let g = random_connected_graph(&mut rng, n);
        let u = random_embedding(&mut rng, n, 3, p);
        let scaled = Embedding::new(
            u.columns()
                .iter()
                .map(|c| DenseVector::from_vec((0..n).map(|i| 3.7 * c[i]).collect()))
                .collect(),
            p,
        )
        .unwrap();
        let f1 = objective(&ctx, &g, &u).unwrap().value;
        let f2 = objective(&ctx, &g, &scaled).unwrap().value;
        assert!(
            (f1 - f2).abs() <= 1e-12 * f1.abs().max(1.0),
            "p={p}: {f1} vs {f2}"
        );
    }
}

#[test]
fn p2_reduces_to_the_linear_laplacian() {
    let ctx = KernelContext::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let n = 35;
    let g = random_connected_graph(&mut rng, n);
    let u = DenseVector::from_vec((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());

    // (D - W) u by plain loops.
    let mut want = vec![0.0; n];
    for (i, j, w) in g.edges() {
        want[i] += w * (u[i] - u[j]);
        want[j] += w * (u[j] - u[i]);
    }
    let got = p_laplacian_apply(&ctx, &g, &u, 2.0).unwrap();
    for i in 0..n {
        assert!((got[i] - want[i]).abs() <= 1e-12 * want[i].abs().max(1.0));
    }

    // Objective at p = 2 equals the sum of Rayleigh quotients u^T L u / u^T u.
    let emb = random_embedding(&mut rng, n, 2, 2.0);
    let obj = objective(&ctx, &g, &emb).unwrap();
    let mut want = 0.0;
    for l in 0..2 {
        let c = emb.column(l);
        let lu = p_laplacian_apply(&ctx, &g, c, 2.0).unwrap();
        let num: f64 = (0..n).map(|i| c[i] * lu[i]).sum();
        let den: f64 = (0..n).map(|i| c[i] * c[i]).sum();
        want += num / den;
    }
    assert!((obj.value - want).abs() <= 1e-12 * want.abs().max(1.0));
}
