//! Outer trust-region Newton loop and the continuation driver.

use std::time::Instant;

use crate::algebra::KernelContext;
use crate::graph::Graph;
use crate::model::{build_hessian_parts, euc_grad, euc_hessian_eta, objective, Embedding, ModelError};

use super::dense::{cross_gram, subtract_mixed, tnorm, Tangent};
use super::geometry::{init_p2, project_tangent, reorthonormalize, require_orthonormal, retract};
use super::tcg::truncated_cg;
use super::{ContinuationSchedule, IterRecord, SolveTrace, SolverConfig, SolverError, StageTiming};

/// Trust radii below this stop the outer loop; the model can no longer
/// produce a move distinguishable from rounding.
const DELTA_FLOOR: f64 = 1e-14;

/// Minimizes `F_p` at a fixed `p` from the orthonormal start `u0`.
///
/// Per outer iteration: Hessian parts are built once; the Riemannian
/// gradient is the projected Euclidean gradient; the Riemannian Hessian
/// operator is `xi -> P(EucHess(xi) - xi * sym(U' G))`; the step comes from
/// truncated CG; a ratio test accepts or rejects and updates the radius.
/// Accepted steps strictly decrease `F_p`; iterates stay orthonormal.
pub fn trust_region_newton(
    ctx: &KernelContext,
    graph: &Graph,
    p: f64,
    u0: &Embedding,
    cfg: &SolverConfig,
) -> Result<(Embedding, SolveTrace), SolverError> {
    cfg.validate()?;
    let mut u = u0.clone();
    u.set_p(p)?;
    require_orthonormal(&u, "trust_region_newton")?;
    let (n, k) = (u.n(), u.k());
    let grad_tol = cfg.effective_grad_tol(n, k);
    let tcg_max = cfg.effective_tcg_max(n, k);
    let mut delta = cfg.tr_delta0;
    let mut trace = SolveTrace::default();
    let stage_start = Instant::now();

    let mut f = objective(ctx, graph, &u)?.value;
    if !f.is_finite() {
        return Err(SolverError::NonFinite {
            what: "objective",
            p,
            trace: Box::new(trace),
        });
    }

    for iter in 0..cfg.max_outer {
        let t0 = Instant::now();
        require_orthonormal(&u, "trust_region_newton iterate")?;

        let eg = euc_grad(ctx, graph, &u)?;
        let rg = project_tangent(ctx, &u, &eg)?;
        let gradnorm = tnorm(ctx, &rg);
        if !gradnorm.is_finite() {
            return Err(SolverError::NonFinite {
                what: "gradient",
                p,
                trace: Box::new(trace),
            });
        }
        if gradnorm <= grad_tol {
            trace.iterations.push(IterRecord {
                p,
                iter,
                f,
                gradnorm,
                delta,
                tcg_iters: 0,
                accepted: false,
                millis: t0.elapsed().as_secs_f64() * 1e3,
            });
            break;
        }

        let parts = build_hessian_parts(ctx, graph, &u, cfg.hessian_mode, cfg.eps)?;
        // U'G, symmetrized so the curvature correction keeps the operator
        // symmetric on the tangent space.
        let mut m = cross_gram(ctx, u.columns(), &eg);
        for a in 0..k {
            for b in (a + 1)..k {
                let s = 0.5 * (m[a][b] + m[b][a]);
                m[a][b] = s;
                m[b][a] = s;
            }
        }
        let hess_op = |xi: &Tangent| -> Result<Tangent, SolverError> {
            let he = euc_hessian_eta(ctx, &parts, &u, xi)?;
            let corrected = subtract_mixed(ctx, &he, xi, &m);
            project_tangent(ctx, &u, &corrected)
        };
        let inner = truncated_cg(ctx, hess_op, &rg, delta, cfg.tcg_kappa, cfg.tcg_theta, tcg_max)?;
        assert!(
            inner.model_decrease >= 0.0,
            "tCG model decrease {} is negative",
            inner.model_decrease
        );
        let step_norm = tnorm(ctx, &inner.step);

        // Rank deficiency or a non-finite trial value both surface as a
        // rejected step; the radius shrinks and the loop retries.
        let mut accepted = false;
        let mut rho = f64::NEG_INFINITY;
        let mut trial: Option<(Embedding, f64)> = None;
        match retract(&u, &inner.step) {
            Ok(u_try) => match objective(ctx, graph, &u_try) {
                Ok(o) if o.value.is_finite() => {
                    rho = (f - o.value) / inner.model_decrease.max(f64::MIN_POSITIVE);
                    accepted = rho > cfg.tr_rho_accept && o.value < f;
                    trial = Some((u_try, o.value));
                }
                Ok(_) | Err(ModelError::NonFinite(_)) => {}
                Err(e) => return Err(e.into()),
            },
            Err(SolverError::RankDeficient { .. }) => {}
            Err(e) => return Err(e),
        }

        if accepted {
            let (u_try, f_try) = trial.expect("accepted step has a trial point");
            assert!(f_try < f, "accepted step must strictly decrease F_p");
            u = u_try;
            f = f_try;
        }
        trace.iterations.push(IterRecord {
            p,
            iter,
            f,
            gradnorm,
            delta,
            tcg_iters: inner.iters,
            accepted,
            millis: t0.elapsed().as_secs_f64() * 1e3,
        });

        if rho < 0.25 {
            delta *= 0.5;
        } else if rho > 0.75 && step_norm >= 0.8 * delta {
            delta = (2.0 * delta).min(cfg.tr_delta_max);
        }
        if delta < DELTA_FLOOR {
            break;
        }
    }

    trace.stages.push(StageTiming {
        p,
        outer_iters: trace.iterations.len(),
        millis: stage_start.elapsed().as_secs_f64() * 1e3,
    });
    debug_assert!(trace.accepted_f_monotone());
    Ok((u, trace))
}

/// Continuation over decreasing `p`: solve at `p = 2` from the seeded
/// initialization, then warm-start each subsequent stage from the previous
/// solution after QR re-orthonormalization. Returns the final embedding;
/// use [`continuation_solve_stages`] to also obtain the converged embedding
/// of every intermediate `p` level.
pub fn continuation_solve(
    ctx: &KernelContext,
    graph: &Graph,
    k: usize,
    schedule: &ContinuationSchedule,
    cfg: &SolverConfig,
) -> Result<(Embedding, SolveTrace), SolverError> {
    let (mut stages, trace) = continuation_solve_stages(ctx, graph, k, schedule, cfg)?;
    let last = stages.pop().expect("schedule has at least one stage");
    Ok((last.embedding, trace))
}

/// The converged embedding of one continuation stage.
#[derive(Debug, Clone)]
pub struct StageEmbedding {
    pub p: f64,
    pub embedding: Embedding,
}

/// Like [`continuation_solve`], but keeps the converged embedding of every
/// `p` level (ordered as in the schedule, final level last). Downstream
/// consumers can discretize each level and retain the best-scoring
/// partition rather than committing to the final level blindly.
pub fn continuation_solve_stages(
    ctx: &KernelContext,
    graph: &Graph,
    k: usize,
    schedule: &ContinuationSchedule,
    cfg: &SolverConfig,
) -> Result<(Vec<StageEmbedding>, SolveTrace), SolverError> {
    cfg.validate()?;
    let mut u = init_p2(graph, k, cfg.seed)?;
    let mut trace = SolveTrace::default();
    let mut stages = Vec::new();
    for (stage, &p) in schedule.sequence().iter().enumerate() {
        let start = if stage == 0 {
            u.clone()
        } else {
            reorthonormalize(&u).map_err(|e| SolverError::AtStage {
                p,
                source: Box::new(e),
            })?
        };
        let (u_next, stage_trace) =
            trust_region_newton(ctx, graph, p, &start, cfg).map_err(|e| SolverError::AtStage {
                p,
                source: Box::new(e),
            })?;
        u = u_next;
        stages.push(StageEmbedding {
            p,
            embedding: u.clone(),
        });
        let offset = trace.iterations.len();
        trace
            .iterations
            .extend(stage_trace.iterations.into_iter().map(|mut r| {
                r.iter += offset;
                r
            }));
        trace.stages.extend(stage_trace.stages);
    }
    Ok((stages, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DenseVector;
    use crate::graph::Graph;

    fn ctx() -> KernelContext {
        KernelContext::new(1).unwrap()
    }

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn constant_vector_converges_immediately() {
        let ctx = ctx();
        let g = path_graph(5);
        let c = 1.0 / (5.0f64).sqrt();
        let u0 = Embedding::new(vec![DenseVector::filled(5, c)], 2.0).unwrap();
        let cfg = SolverConfig::default();
        let (u, trace) = trust_region_newton(&ctx, &g, 2.0, &u0, &cfg).unwrap();
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(trace.iterations[0].f, 0.0);
        assert_eq!(trace.iterations[0].tcg_iters, 0);
        assert!(u.gram_deviation() < 1e-12);
    }

    #[test]
    fn path3_two_columns_reaches_eigenvalue_sum() {
        // P3 Laplacian eigenvalues: 0, 1, 3; best two-dimensional value is 1.
        let ctx = ctx();
        let g = path_graph(3);
        let u0 = init_p2(&g, 2, 11).unwrap();
        let cfg = SolverConfig::default();
        let (_, trace) = trust_region_newton(&ctx, &g, 2.0, &u0, &cfg).unwrap();
        let f = trace.iterations.last().unwrap().f;
        assert!((f - 1.0).abs() < 1e-8, "F* = {f}");
        assert!(trace.accepted_f_monotone());
    }

    #[test]
    fn rejects_non_orthonormal_start() {
        let ctx = ctx();
        let g = path_graph(4);
        let u0 = Embedding::new(vec![DenseVector::filled(4, 1.0)], 2.0).unwrap();
        assert!(matches!(
            trust_region_newton(&ctx, &g, 2.0, &u0, &SolverConfig::default()),
            Err(SolverError::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn continuation_with_p_final_2_matches_single_solve() {
        let ctx = ctx();
        let g = path_graph(8);
        let cfg = SolverConfig {
            seed: 3,
            ..SolverConfig::default()
        };
        let schedule = ContinuationSchedule::new(2.0, 0.9).unwrap();
        let (u_cont, _) = continuation_solve(&ctx, &g, 2, &schedule, &cfg).unwrap();
        let u0 = init_p2(&g, 2, 3).unwrap();
        let (u_single, _) = trust_region_newton(&ctx, &g, 2.0, &u0, &cfg).unwrap();
        for l in 0..2 {
            assert_eq!(u_cont.column(l).as_slice(), u_single.column(l).as_slice());
        }
    }

    #[test]
    fn continuation_descends_through_stages() {
        let ctx = ctx();
        let (g, _) = crate::graph::generate_synthetic(&crate::graph::SyntheticSpec {
            family: crate::graph::Family::RingOfCliques {
                cliques: 4,
                clique_size: 5,
            },
            seed: 0,
        })
        .unwrap();
        let cfg = SolverConfig {
            seed: 7,
            ..SolverConfig::default()
        };
        let schedule = ContinuationSchedule::new(1.5, 0.9).unwrap();
        let (u, trace) = continuation_solve(&ctx, &g, 4, &schedule, &cfg).unwrap();
        assert_eq!(trace.stages.len(), 4);
        assert!(trace.accepted_f_monotone());
        assert!(u.gram_deviation() < 1e-10);
        assert_eq!(u.p(), 1.5);
    }
}
