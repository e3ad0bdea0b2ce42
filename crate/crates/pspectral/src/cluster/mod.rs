//! Discretization and partition quality scoring.
//!
//! ```
//! use pspectral::algebra::KernelContext;
//! use pspectral::cluster::{kmeans, rcut, ClusterAssignment, KMeansConfig};
//! use pspectral::graph::Graph;
//!
//! let ctx = KernelContext::new(1).unwrap();
//! let points = vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]];
//! let (assignment, sse) = kmeans(&ctx, &points, 2, &KMeansConfig::default()).unwrap();
//! assert!((sse - 0.01).abs() < 1e-12);
//! assert_eq!(assignment.sizes(), vec![2, 2]);
//!
//! let ring = Graph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
//! let halves = ClusterAssignment::from_labels(vec![1, 1, 2, 2], 2).unwrap();
//! assert_eq!(rcut(&ring, &halves).unwrap(), 2.0);
//! ```

mod kmeans;
mod metrics;

pub use kmeans::{kmeans, KMeansConfig};
pub use metrics::{confusion_accuracy, cut, rcut};

#[derive(Debug, thiserror::Error)]
pub enum ClusterError {
    #[error("need at least k = {k} points, got n = {n}")]
    TooFewPoints { n: usize, k: usize },
    #[error("invalid k-means configuration: {0}")]
    InvalidConfig(String),
    #[error("label {label} out of range 1..={k}")]
    LabelOutOfRange { label: u32, k: usize },
    #[error("cluster {0} is empty")]
    EmptyCluster(u32),
    #[error("subset must be nonempty and proper")]
    ImproperSubset,
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("points must share one dimension")]
    DimensionMismatch,
}

/// A map node -> cluster id in `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<u32>,
    k: usize,
}

impl ClusterAssignment {
    pub fn from_labels(labels: Vec<u32>, k: usize) -> Result<Self, ClusterError> {
        for &l in &labels {
            if l < 1 || l as usize > k {
                return Err(ClusterError::LabelOutOfRange { label: l, k });
            }
        }
        Ok(ClusterAssignment { labels, k })
    }

    /// Builds from 0-based labels, e.g. component ids or synthetic ground
    /// truth.
    pub fn from_zero_based(labels: &[usize], k: usize) -> Result<Self, ClusterError> {
        Self::from_labels(labels.iter().map(|&l| l as u32 + 1).collect(), k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// 1-based cluster id of node `i`.
    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Per-cluster node counts, indexed by cluster id minus one.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l as usize - 1] += 1;
        }
        sizes
    }

    /// Errors with the first empty cluster, if any.
    pub fn require_nonempty(&self) -> Result<(), ClusterError> {
        for (c, &s) in self.sizes().iter().enumerate() {
            if s == 0 {
                return Err(ClusterError::EmptyCluster(c as u32 + 1));
            }
        }
        Ok(())
    }

    /// Writes the assignment file: one `<node_id> <cluster_id>` line per
    /// node, 0-based node ids, 1-based cluster ids.
    pub fn write<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, &l) in self.labels.iter().enumerate() {
            writeln!(w, "{i} {l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_range_is_enforced() {
        assert!(ClusterAssignment::from_labels(vec![1, 2, 3], 2).is_err());
        assert!(ClusterAssignment::from_labels(vec![0], 2).is_err());
        let a = ClusterAssignment::from_labels(vec![1, 2, 1], 2).unwrap();
        assert_eq!(a.sizes(), vec![2, 1]);
        a.require_nonempty().unwrap();
        let b = ClusterAssignment::from_labels(vec![1, 1], 2).unwrap();
        assert!(matches!(
            b.require_nonempty(),
            Err(ClusterError::EmptyCluster(2))
        ));
    }

    #[test]
    fn assignment_file_format() {
        let a = ClusterAssignment::from_zero_based(&[0, 1, 0], 2).unwrap();
        let mut buf = Vec::new();
        a.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n1 2\n2 1\n");
    }
}
