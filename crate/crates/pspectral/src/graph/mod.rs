//! Graph ingestion and generation.
//!
//! A [`Graph`] is a validated undirected weighted graph: exactly symmetric
//! adjacency, zero diagonal, strictly positive weights. Graphs come from
//! Matrix Market files ([`parse_matrix_market`]) or seeded synthetic
//! families ([`generate_synthetic`]).
//!
//! ```
//! use std::io::Cursor;
//! use pspectral::graph::{parse_matrix_market, Graph};
//!
//! let mtx = "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 1 1.0\n3 2 0.5\n";
//! let g = parse_matrix_market(Cursor::new(mtx)).unwrap();
//! assert_eq!((g.n(), g.m()), (3, 2));
//! assert_eq!(g.degree(1), 1.5);
//!
//! let path = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 0.5)]).unwrap();
//! assert_eq!(path.adjacency().get(1, 0), Some(1.0)); // both triangles stored
//! ```

mod matrix_market;
mod synthetic;

pub use matrix_market::{parse_matrix_market, write_matrix_market, MmParseError};
pub use synthetic::{generate_synthetic, Family, SyntheticSpec};

use crate::algebra::SparseMatrix;

/// Errors from graph construction and validation.
#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) has nonpositive weight {2}")]
    NonPositiveWeight(usize, usize, f64),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node index {0} out of range for {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("adjacency is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// Validated undirected weighted graph.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    m: usize,
    adjacency: SparseMatrix<f64>,
    isolated: Vec<usize>,
}

impl Graph {
    /// Builds a graph from undirected edges `(i, j, w)` with `i != j`.
    /// Each edge is stored in both triangles. Edges may be listed in either
    /// orientation but only once.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut triples: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * edges.len());
        for &(i, j, w) in edges {
            if i >= n {
                return Err(GraphError::NodeOutOfRange(i, n));
            }
            if j >= n {
                return Err(GraphError::NodeOutOfRange(j, n));
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !(w > 0.0) {
                return Err(GraphError::NonPositiveWeight(i, j, w));
            }
            triples.push((i, j, w));
            triples.push((j, i, w));
        }
        let adjacency = SparseMatrix::from_triples(n, n, &triples).map_err(|e| match e {
            crate::algebra::AlgebraError::DuplicateEntry { row, col } => {
                GraphError::DuplicateEdge(row.min(col), row.max(col))
            }
            other => GraphError::Algebra(other),
        })?;
        let mut isolated = Vec::new();
        for i in 0..n {
            if adjacency.row(i).next().is_none() {
                isolated.push(i);
            }
        }
        Ok(Graph {
            n,
            m: edges.len(),
            adjacency,
            isolated,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Undirected edge count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Symmetric adjacency with both triangles stored.
    pub fn adjacency(&self) -> &SparseMatrix<f64> {
        &self.adjacency
    }

    /// Nodes with no incident edge. The parser admits them; the pipeline
    /// refuses them unless explicitly allowed.
    pub fn isolated_nodes(&self) -> &[usize] {
        &self.isolated
    }

    /// Undirected edges `(i, j, w)` with `i < j`, each exactly once.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.triples().filter(|&(i, j, _)| i < j)
    }

    /// Re-checks every structural invariant; used by tests on every
    /// construction path.
    pub fn validate(&self) -> Result<(), GraphError> {
        let a = &self.adjacency;
        for (i, j, w) in a.triples() {
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !(w > 0.0) {
                return Err(GraphError::NonPositiveWeight(i, j, w));
            }
            match a.get(j, i) {
                Some(wt) if wt.to_bits() == w.to_bits() => {}
                _ => return Err(GraphError::NotSymmetric(i, j)),
            }
        }
        if a.nnz() != 2 * self.m {
            return Err(GraphError::NotSymmetric(0, 0));
        }
        Ok(())
    }

    /// Weighted degree of node `i`.
    pub fn degree(&self, i: usize) -> f64 {
        self.adjacency.row(i).map(|(_, w)| w).sum()
    }
}

/// Connected component labels via breadth-first traversal.
///
/// Components are numbered `0..c` in order of their smallest contained node
/// id, so the labeling is deterministic.
pub fn connected_components(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut labels = vec![usize::MAX; n];
    let mut next_label = 0;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = next_label;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for (j, _) in g.adjacency().row(i) {
                if labels[j] == usize::MAX {
                    labels[j] = next_label;
                    queue.push_back(j);
                }
            }
        }
        next_label += 1;
    }
    labels
}
