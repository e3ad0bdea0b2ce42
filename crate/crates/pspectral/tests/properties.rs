//! Property tests for structural invariants.

use proptest::prelude::*;

use pspectral::algebra::{DenseVector, KernelContext, PlusTimes, SparseMatrix};
use pspectral::graph::Graph;
use pspectral::model::phi_p;

proptest! {
    #[test]
    fn phi_is_odd_and_monotone(x in -100.0f64..100.0, p in 1.0001f64..2.0) {
        let f = phi_p(x, p).unwrap();
        let g = phi_p(-x, p).unwrap();
        prop_assert!((f + g).abs() <= 1e-12 * f.abs().max(1.0));
        prop_assert!(f.signum() == x.signum() || x == 0.0);
        let f2 = phi_p(x + 1.0, p).unwrap();
        prop_assert!(f2 >= f);
    }

    #[test]
    fn from_triples_preserves_every_entry(
        entries in prop::collection::btree_map((0usize..20, 0usize..20), -10.0f64..10.0, 0..60)
    ) {
        let triples: Vec<(usize, usize, f64)> =
            entries.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        let a = SparseMatrix::from_triples(20, 20, &triples).unwrap();
        for &(i, j, v) in &triples {
            prop_assert_eq!(a.get(i, j), Some(v));
        }
        prop_assert_eq!(a.triples().count(), triples.len());
    }

    #[test]
    fn vxm_is_linear_in_the_vector(
        entries in prop::collection::btree_map((0usize..10, 0usize..10), -5.0f64..5.0, 0..30),
        v1 in prop::collection::vec(-3.0f64..3.0, 10),
        v2 in prop::collection::vec(-3.0f64..3.0, 10),
        alpha in -2.0f64..2.0,
    ) {
        let ctx = KernelContext::new(1).unwrap();
        let triples: Vec<(usize, usize, f64)> =
            entries.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        let a = SparseMatrix::from_triples(10, 10, &triples).unwrap();
        let mix: Vec<f64> = v1.iter().zip(&v2).map(|(x, y)| x + alpha * y).collect();
        let lhs = pspectral::algebra::vxm::<PlusTimes<f64>>(
            &ctx, &DenseVector::from_vec(mix), &a).unwrap();
        let r1 = pspectral::algebra::vxm::<PlusTimes<f64>>(
            &ctx, &DenseVector::from_vec(v1), &a).unwrap();
        let r2 = pspectral::algebra::vxm::<PlusTimes<f64>>(
            &ctx, &DenseVector::from_vec(v2), &a).unwrap();
        for j in 0..10 {
            let want = r1[j] + alpha * r2[j];
            prop_assert!((lhs[j] - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn graph_edges_iterate_each_undirected_edge_once(
        pairs in prop::collection::btree_set((0usize..15, 0usize..15), 1..40)
    ) {
        let edges: Vec<(usize, usize, f64)> = pairs
            .iter()
            .filter(|&&(i, j)| i < j)
            .map(|&(i, j)| (i, j, 1.0))
            .collect();
        prop_assume!(!edges.is_empty());
        let g = Graph::from_edges(15, &edges).unwrap();
        prop_assert_eq!(g.m(), edges.len());
        let listed: Vec<(usize, usize)> = g.edges().map(|(i, j, _)| (i, j)).collect();
        let mut want: Vec<(usize, usize)> = edges.iter().map(|&(i, j, _)| (i, j)).collect();
        want.sort_unstable();
        prop_assert_eq!(listed, want);
        g.validate().unwrap();
    }
}
