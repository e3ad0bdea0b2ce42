//! Multiway p-spectral graph clustering.
//!
//! The pipeline: load or generate an undirected weighted graph, minimize the
//! graph p-Laplacian Rayleigh-quotient objective over the Grassmann manifold
//! with trust-region Newton and truncated CG (continuing from `p = 2` down
//! to a target `p`), discretize the resulting embedding with k-means, and
//! score the partition with the ratio-cut metric.
//!
//! ```
//! use pspectral::algebra::KernelContext;
//! use pspectral::graph::{generate_synthetic, Family, SyntheticSpec};
//! use pspectral::solver::{continuation_solve, ContinuationSchedule, SolverConfig};
//! use pspectral::cluster::{kmeans, rcut, KMeansConfig};
//!
//! let ctx = KernelContext::new(1).unwrap();
//! let spec = SyntheticSpec {
//!     family: Family::RingOfCliques { cliques: 3, clique_size: 4 },
//!     seed: 7,
//! };
//! let (graph, _truth) = generate_synthetic(&spec).unwrap();
//!
//! let schedule = ContinuationSchedule::new(1.5, 0.9).unwrap();
//! let cfg = SolverConfig { seed: 42, ..SolverConfig::default() };
//! let (embedding, _trace) = continuation_solve(&ctx, &graph, 3, &schedule, &cfg).unwrap();
//!
//! let points: Vec<Vec<f64>> = (0..graph.n()).map(|i| embedding.row(i)).collect();
//! let (assignment, _sse) = kmeans(&ctx, &points, 3, &KMeansConfig::default()).unwrap();
//! let cut_score = rcut(&graph, &assignment).unwrap();
//! // perfect recovery: each clique is cut only by its two ring bridges
//! assert!((cut_score - 3.0 * 2.0 / 4.0).abs() < 1e-9);
//! ```

pub mod algebra;
pub mod cluster;
pub mod graph;
pub mod model;
pub mod solver;
