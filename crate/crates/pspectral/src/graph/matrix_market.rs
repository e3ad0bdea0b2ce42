//! Matrix Market coordinate reader and writer.
//!
//! Accepts `%%MatrixMarket matrix coordinate <field> <symmetry>` with field
//! in {real, integer, pattern} and symmetry in {general, symmetric}, 1-based
//! indices and `%` comment lines. Pattern entries get weight 1.0, symmetric
//! storage is mirrored, general storage is symmetrized with
//! `w = max(w_ij, w_ji)`, and self-loops are dropped with a warning.

use std::collections::HashMap;
use std::io::BufRead;

use super::{Graph, GraphError};

#[derive(Debug, thiserror::Error)]
pub enum MmParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: index ({i}, {j}) out of range for {n} nodes")]
    IndexOutOfRange {
        line: usize,
        i: usize,
        j: usize,
        n: usize,
    },
    #[error("line {line}: duplicate entry ({i}, {j})")]
    Duplicate { line: usize, i: usize, j: usize },
    #[error("line {line}: nonpositive weight {w} at ({i}, {j})")]
    NonPositiveWeight {
        line: usize,
        i: usize,
        j: usize,
        w: f64,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn malformed(line: usize, msg: impl Into<String>) -> MmParseError {
    MmParseError::Malformed {
        line,
        msg: msg.into(),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
}

/// Parses a Matrix Market stream into a validated [`Graph`].
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<Graph, MmParseError> {
    let mut lines = reader.lines().enumerate();

    let (lineno, header) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (idx + 1, line);
                }
            }
            None => return Err(malformed(0, "empty input, missing MatrixMarket header")),
        }
    };
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 5 || !tokens[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(malformed(
            lineno,
            format!("expected '%%MatrixMarket matrix coordinate <field> <symmetry>', got '{header}'"),
        ));
    }
    if !tokens[1].eq_ignore_ascii_case("matrix") || !tokens[2].eq_ignore_ascii_case("coordinate") {
        return Err(malformed(lineno, "only 'matrix coordinate' objects are supported"));
    }
    let field = match tokens[3].to_ascii_lowercase().as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(malformed(lineno, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].to_ascii_lowercase().as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(malformed(lineno, format!("unsupported symmetry '{other}'"))),
    };

    // Size line: first non-comment, non-blank line after the header.
    let (size_lineno, size_line) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                let t = line.trim();
                if !t.is_empty() && !t.starts_with('%') {
                    break (idx + 1, line);
                }
            }
            None => return Err(malformed(0, "missing size line")),
        }
    };
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(malformed(size_lineno, "size line must be '<rows> <cols> <nnz>'"));
    }
    let nrows: i64 = dims[0]
        .parse()
        .map_err(|_| malformed(size_lineno, "bad row count"))?;
    let ncols: i64 = dims[1]
        .parse()
        .map_err(|_| malformed(size_lineno, "bad column count"))?;
    let nnz: i64 = dims[2]
        .parse()
        .map_err(|_| malformed(size_lineno, "bad entry count"))?;
    if nrows <= 0 || ncols <= 0 {
        return Err(malformed(size_lineno, "matrix dimensions must be positive"));
    }
    if nrows != ncols {
        return Err(malformed(size_lineno, "adjacency matrix must be square"));
    }
    if nnz < 0 {
        return Err(malformed(size_lineno, "entry count must be nonnegative"));
    }
    let n = nrows as usize;

    // Unordered-pair weights after mirroring/symmetrization. `seen` tracks
    // exact storage keys for duplicate detection.
    let mut weights: HashMap<(usize, usize), f64> = HashMap::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut dropped_loops = 0usize;
    let mut parsed = 0i64;

    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let expected = if field == Field::Pattern { 2 } else { 3 };
        if toks.len() != expected {
            return Err(malformed(
                lineno,
                format!("expected {expected} tokens on entry line, got {}", toks.len()),
            ));
        }
        let i1: i64 = toks[0]
            .parse()
            .map_err(|_| malformed(lineno, "bad row index"))?;
        let j1: i64 = toks[1]
            .parse()
            .map_err(|_| malformed(lineno, "bad column index"))?;
        if i1 < 1 || j1 < 1 || i1 > nrows || j1 > ncols {
            return Err(MmParseError::IndexOutOfRange {
                line: lineno,
                i: i1 as usize,
                j: j1 as usize,
                n,
            });
        }
        let (i, j) = ((i1 - 1) as usize, (j1 - 1) as usize);
        let w = match field {
            Field::Pattern => 1.0,
            Field::Real => toks[2]
                .parse::<f64>()
                .map_err(|_| malformed(lineno, "bad real value"))?,
            Field::Integer => toks[2]
                .parse::<i64>()
                .map_err(|_| malformed(lineno, "bad integer value"))? as f64,
        };
        parsed += 1;

        // Duplicate detection is on the stored key: exact (i, j) for general
        // storage, the unordered pair for symmetric storage.
        let key = match symmetry {
            Symmetry::General => (i, j),
            Symmetry::Symmetric => (i.min(j), i.max(j)),
        };
        if let Some(prev) = seen.insert(key, lineno) {
            let _ = prev;
            return Err(MmParseError::Duplicate {
                line: lineno,
                i: i1 as usize,
                j: j1 as usize,
            });
        }

        if i == j {
            dropped_loops += 1;
            continue;
        }
        if !(w > 0.0) {
            return Err(MmParseError::NonPositiveWeight {
                line: lineno,
                i: i1 as usize,
                j: j1 as usize,
                w,
            });
        }
        let pair = (i.min(j), i.max(j));
        let entry = weights.entry(pair).or_insert(w);
        // General storage may carry both orientations; keep the max.
        if w > *entry {
            *entry = w;
        }
    }

    if parsed != nnz {
        log::warn!("matrix market: header declared {nnz} entries, found {parsed}");
    }
    if dropped_loops > 0 {
        log::warn!("matrix market: dropped {dropped_loops} self-loop(s)");
    }

    let mut edges: Vec<(usize, usize, f64)> =
        weights.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    edges.sort_by_key(|&(i, j, _)| (i, j));
    let g = Graph::from_edges(n, &edges)?;
    if !g.isolated_nodes().is_empty() {
        log::warn!(
            "matrix market: graph has {} isolated node(s)",
            g.isolated_nodes().len()
        );
    }
    Ok(g)
}

/// Writes a graph as symmetric coordinate real Matrix Market, lower triangle
/// only, 1-based. Weights print in shortest round-trip form so
/// `parse(write(g))` reproduces `g` exactly.
pub fn write_matrix_market<W: std::io::Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", g.n(), g.n(), g.m())?;
    for (i, j, wt) in g.edges() {
        // (i, j) with i < j; emit as (j+1, i+1) so rows >= cols.
        writeln!(w, "{} {} {}", j + 1, i + 1, wt)?;
    }
    Ok(())
}
