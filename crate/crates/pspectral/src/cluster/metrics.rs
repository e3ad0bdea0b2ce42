//! Balanced-cut metrics and ground-truth accuracy.

use crate::graph::Graph;

use super::{ClusterAssignment, ClusterError};

/// Total weight of edges crossing between `subset` and its complement, each
/// undirected edge counted once. `subset[i]` marks membership of node `i`.
pub fn cut(g: &Graph, subset: &[bool]) -> Result<f64, ClusterError> {
    if subset.len() != g.n() {
        return Err(ClusterError::SizeMismatch(subset.len(), g.n()));
    }
    let inside = subset.iter().filter(|&&b| b).count();
    if inside == 0 || inside == g.n() {
        return Err(ClusterError::ImproperSubset);
    }
    Ok(g.edges()
        .filter(|&(i, j, _)| subset[i] != subset[j])
        .map(|(_, _, w)| w)
        .sum())
}

/// Ratio cut: `sum_i cut(C_i, complement) / |C_i|`. Lower is better; zero
/// exactly when every cluster is a union of connected components.
pub fn rcut(g: &Graph, a: &ClusterAssignment) -> Result<f64, ClusterError> {
    if a.len() != g.n() {
        return Err(ClusterError::SizeMismatch(a.len(), g.n()));
    }
    a.require_nonempty()?;
    let sizes = a.sizes();
    let mut cuts = vec![0.0f64; a.k()];
    for (i, j, w) in g.edges() {
        let (li, lj) = (a.label(i), a.label(j));
        if li != lj {
            cuts[li as usize - 1] += w;
            cuts[lj as usize - 1] += w;
        }
    }
    Ok(cuts
        .iter()
        .zip(&sizes)
        .map(|(c, &s)| c / s as f64)
        .sum())
}

/// Best label-matching accuracy in `[0, 1]`: the maximum over cluster label
/// permutations of the fraction of nodes labeled identically. Exhaustive
/// permutation search up to k = 8, Hungarian assignment beyond.
pub fn confusion_accuracy(
    a: &ClusterAssignment,
    truth: &ClusterAssignment,
) -> Result<f64, ClusterError> {
    if a.len() != truth.len() {
        return Err(ClusterError::SizeMismatch(a.len(), truth.len()));
    }
    if a.k() != truth.k() {
        return Err(ClusterError::SizeMismatch(a.k(), truth.k()));
    }
    let k = a.k();
    let n = a.len();
    let mut counts = vec![vec![0i64; k]; k];
    for i in 0..n {
        counts[a.label(i) as usize - 1][truth.label(i) as usize - 1] += 1;
    }
    let matched = if k <= 8 {
        best_permutation_score(&counts)
    } else {
        hungarian_max(&counts)
    };
    Ok(matched as f64 / n as f64)
}

/// Exhaustive max over permutations via Heap's algorithm.
fn best_permutation_score(counts: &[Vec<i64>]) -> i64 {
    let k = counts.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    let score = |perm: &[usize]| -> i64 { (0..k).map(|i| counts[i][perm[i]]).sum() };
    let mut best = score(&perm);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// O(k^3) Hungarian algorithm (potentials form), maximizing the total count.
fn hungarian_max(counts: &[Vec<i64>]) -> i64 {
    let k = counts.len();
    // Minimize negated counts.
    let cost: Vec<Vec<i64>> = counts
        .iter()
        .map(|row| row.iter().map(|&x| -x).collect())
        .collect();
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=k).map(|j| counts[p[j] - 1][j - 1]).sum()
}
