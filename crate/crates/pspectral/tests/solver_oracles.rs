//! Solver checked against a dense symmetric eigensolver at p = 2, plus the
//! continuation-improves-the-objective trend and worker-count determinism.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pspectral::algebra::KernelContext;
use pspectral::graph::{generate_synthetic, Family, Graph, SyntheticSpec};
use pspectral::model::{objective, Embedding};
use pspectral::solver::{
    continuation_solve, init_p2, trust_region_newton, ContinuationSchedule, SolverConfig,
};

fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges: Vec<(usize, usize, f64)> = (0..n - 1)
        .map(|i| (i, i + 1, rng.gen_range(0.2..2.0)))
        .collect();
    for _ in 0..(3 * n) {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j && !edges.iter().any(|&(a, b, _)| (a.min(b), a.max(b)) == (i.min(j), i.max(j))) {
            edges.push((i.min(j), i.max(j), rng.gen_range(0.2..2.0)));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Sum of the k smallest Laplacian eigenvalues via a dense eigensolver. At
/// p = 2 the Rayleigh-quotient objective over orthonormal frames attains
/// exactly this value.
fn eigenvalue_sum_oracle(g: &Graph, k: usize) -> f64 {
    let n = g.n();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for (i, j, w) in g.edges() {
        l[(i, j)] -= w;
        l[(j, i)] -= w;
        l[(i, i)] += w;
        l[(j, j)] += w;
    }
    let mut eigs: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs[..k].iter().sum()
}

#[test]
fn p2_solver_reaches_the_eigenvalue_sum() {
    let ctx = KernelContext::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for trial in 0..10 {
        let n = rng.gen_range(20..=200);
        let g = random_connected_graph(&mut rng, n);
        for &k in &[2usize, 4] {
            let want = eigenvalue_sum_oracle(&g, k);
            let u0 = init_p2(&g, k, 1000 + trial).unwrap();
            let cfg = SolverConfig {
                grad_tol: Some(1e-9 * ((n * k) as f64).sqrt()),
                max_outer: 500,
                ..SolverConfig::default()
            };
            let (u, _) = trust_region_newton(&ctx, &g, 2.0, &u0, &cfg).unwrap();
            let got = objective(&ctx, &g, &u).unwrap().value;
            assert!(
                (got - want).abs() <= 1e-6 * want.abs().max(1.0),
                "n={n}, k={k}: solver {got} vs eigensolver {want}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 20);
}

#[test]
fn continuation_beats_the_p2_embedding_at_the_target_p() {
    let ctx = KernelContext::new(1).unwrap();
    let spec = SyntheticSpec {
        family: Family::RingOfCliques {
            cliques: 4,
            clique_size: 5,
        },
        seed: 0,
    };
    let (g, _) = generate_synthetic(&spec).unwrap();
    let schedule = ContinuationSchedule::new(1.5, 0.9).unwrap();
    let mut wins = 0;
    for seed in 0..10u64 {
        let cfg = SolverConfig {
            seed,
            ..SolverConfig::default()
        };
        let (u_cont, _) = continuation_solve(&ctx, &g, 4, &schedule, &cfg).unwrap();
        let f_cont = objective(&ctx, &g, &u_cont).unwrap().value;

        let u0 = init_p2(&g, 4, seed).unwrap();
        let (u_p2, _) = trust_region_newton(&ctx, &g, 2.0, &u0, &cfg).unwrap();
        let at_target = Embedding::new(u_p2.into_columns(), 1.5).unwrap();
        let f_p2 = objective(&ctx, &g, &at_target).unwrap().value;

        if f_cont <= f_p2 + 1e-12 {
            wins += 1;
        }
    }
    assert!(wins >= 9, "continuation improved only {wins}/10 seeds");
}

#[test]
fn solve_is_bitwise_identical_across_worker_counts() {
    let spec = SyntheticSpec {
        family: Family::RingOfCliques {
            cliques: 4,
            clique_size: 5,
        },
        seed: 0,
    };
    let (g, _) = generate_synthetic(&spec).unwrap();
    let schedule = ContinuationSchedule::new(1.5, 0.9).unwrap();
    let cfg = SolverConfig {
        seed: 42,
        ..SolverConfig::default()
    };
    let solve = |threads: usize| {
        let ctx = KernelContext::new(threads).unwrap();
        let (u, _) = continuation_solve(&ctx, &g, 4, &schedule, &cfg).unwrap();
        u
    };
    let base = solve(1);
    for threads in [2, 4, 8] {
        let u = solve(threads);
        for l in 0..4 {
            for i in 0..g.n() {
                assert_eq!(
                    u.column(l)[i].to_bits(),
                    base.column(l)[i].to_bits(),
                    "divergence at {threads} workers, col {l}, row {i}"
                );
            }
        }
    }
}
