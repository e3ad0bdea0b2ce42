//! Seeded synthetic graph families for tests and benchmarks.
//!
//! Generation is a pure function of `(spec, seed)`: the same spec reproduces
//! the same graph bitwise. Each family also returns ground-truth labels
//! (0-based, one per node) for accuracy scoring.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError};

/// Synthetic graph family and its size parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Stochastic block model: `blocks` consecutive blocks of `block_size`
    /// nodes; each intra-block pair is an edge with probability `p_in`,
    /// each inter-block pair with probability `p_out`. Unit weights.
    Sbm {
        blocks: usize,
        block_size: usize,
        p_in: f64,
        p_out: f64,
    },
    /// 4-connected grid on `rows x cols` nodes, unit weights. Ground truth
    /// splits the grid into four equal quadrants.
    Grid2d { rows: usize, cols: usize },
    /// `cliques` complete graphs of `clique_size` nodes joined in a ring by
    /// one bridge edge between consecutive cliques. Unit weights.
    RingOfCliques { cliques: usize, clique_size: usize },
}

/// A synthetic family plus its generation seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub family: Family,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Parses a comma-separated `key=value` spec string, e.g.
    /// `family=sbm,blocks=4,block_size=200,p_in=0.05,p_out=0.002`.
    /// The same keys are accepted one-per-line from a config file.
    pub fn parse_kv(spec: &str, seed: u64) -> Result<Self, GraphError> {
        let mut map = std::collections::HashMap::new();
        for part in spec.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| GraphError::InvalidSpec(format!("expected key=value, got '{part}'")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<String, GraphError> {
            map.get(k)
                .cloned()
                .ok_or_else(|| GraphError::InvalidSpec(format!("missing key '{k}'")))
        };
        let get_usize = |k: &str| -> Result<usize, GraphError> {
            get(k)?
                .parse()
                .map_err(|_| GraphError::InvalidSpec(format!("key '{k}' must be a positive integer")))
        };
        let get_f64 = |k: &str| -> Result<f64, GraphError> {
            get(k)?
                .parse()
                .map_err(|_| GraphError::InvalidSpec(format!("key '{k}' must be a number")))
        };
        let family = match get("family")?.as_str() {
            "sbm" => Family::Sbm {
                blocks: get_usize("blocks")?,
                block_size: get_usize("block_size")?,
                p_in: get_f64("p_in")?,
                p_out: get_f64("p_out")?,
            },
            "grid2d" => Family::Grid2d {
                rows: get_usize("rows")?,
                cols: get_usize("cols")?,
            },
            "ring-of-cliques" => Family::RingOfCliques {
                cliques: get_usize("cliques")?,
                clique_size: get_usize("clique_size")?,
            },
            other => {
                return Err(GraphError::InvalidSpec(format!(
                    "unknown family '{other}' (expected sbm, grid2d, or ring-of-cliques)"
                )))
            }
        };
        let seed = match map.get("seed") {
            Some(s) => s
                .parse()
                .map_err(|_| GraphError::InvalidSpec("key 'seed' must be a 64-bit integer".into()))?,
            None => seed,
        };
        let spec = SyntheticSpec { family, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        match self.family {
            Family::Sbm {
                blocks,
                block_size,
                p_in,
                p_out,
            } => {
                if blocks == 0 || block_size == 0 {
                    return Err(GraphError::InvalidSpec("sbm sizes must be >= 1".into()));
                }
                for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(GraphError::InvalidSpec(format!(
                            "{name}={p} outside [0, 1]"
                        )));
                    }
                }
            }
            Family::Grid2d { rows, cols } => {
                if rows == 0 || cols == 0 {
                    return Err(GraphError::InvalidSpec("grid sizes must be >= 1".into()));
                }
            }
            Family::RingOfCliques {
                cliques,
                clique_size,
            } => {
                if cliques == 0 || clique_size == 0 {
                    return Err(GraphError::InvalidSpec(
                        "ring-of-cliques sizes must be >= 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Generates the graph and its ground-truth labels.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Graph, Vec<usize>), GraphError> {
    spec.validate()?;
    match spec.family {
        Family::Sbm {
            blocks,
            block_size,
            p_in,
            p_out,
        } => {
            let n = blocks * block_size;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let p = if i / block_size == j / block_size {
                        p_in
                    } else {
                        p_out
                    };
                    if rng.gen::<f64>() < p {
                        edges.push((i, j, 1.0));
                    }
                }
            }
            let labels = (0..n).map(|i| i / block_size).collect();
            Ok((Graph::from_edges(n, &edges)?, labels))
        }
        Family::Grid2d { rows, cols } => {
            let n = rows * cols;
            let idx = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((idx(r, c), idx(r, c + 1), 1.0));
                    }
                    if r + 1 < rows {
                        edges.push((idx(r, c), idx(r + 1, c), 1.0));
                    }
                }
            }
            let half_r = rows.div_ceil(2);
            let half_c = cols.div_ceil(2);
            let labels = (0..n)
                .map(|i| {
                    let (r, c) = (i / cols, i % cols);
                    2 * usize::from(r >= half_r) + usize::from(c >= half_c)
                })
                .collect();
            Ok((Graph::from_edges(n, &edges)?, labels))
        }
        Family::RingOfCliques {
            cliques,
            clique_size,
        } => {
            let n = cliques * clique_size;
            let mut edges = Vec::new();
            for q in 0..cliques {
                let base = q * clique_size;
                for a in 0..clique_size {
                    for b in (a + 1)..clique_size {
                        edges.push((base + a, base + b, 1.0));
                    }
                }
            }
            if cliques > 1 {
                for q in 0..cliques {
                    let from = q * clique_size + (clique_size - 1);
                    let to = ((q + 1) % cliques) * clique_size;
                    edges.push((from, to, 1.0));
                }
            }
            edges.sort_by_key(|&(i, j, _)| (i.min(j), i.max(j)));
            edges.dedup_by_key(|&mut (i, j, _)| (i.min(j), i.max(j)));
            let labels = (0..n).map(|i| i / clique_size).collect();
            Ok((Graph::from_edges(n, &edges)?, labels))
        }
    }
}
