//! Whitespace-separated edge lists.
//!
//! One edge per line as `src dst` or `src dst weight`. Lines starting with
//! `#` are comments, except that a `# Nodes: N` comment fixes the vertex
//! count instead of deriving it from the largest id.

use std::io::{BufRead, Write};

use pcpm_core::{CsrGraph, EdgeList, MAX_VERTICES};

use crate::error::{FormatError, Result};

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<EdgeList> {
    let mut declared: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut weights: Vec<f32> = Vec::new();
    let mut weighted: Option<bool> = None;
    let mut max_id: Option<u32> = None;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = parse_nodes_header(comment, line_no)? {
                declared = Some((n, line_no));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(FormatError::Parse {
                line: line_no,
                message: format!("expected `src dst [weight]`, found {} fields", fields.len()),
            });
        }
        let has_weight = fields.len() == 3;
        if *weighted.get_or_insert(has_weight) != has_weight {
            return Err(FormatError::Parse {
                line: line_no,
                message: "weighted and unweighted edges are mixed".into(),
            });
        }
        let s = parse_id(fields[0], line_no)?;
        let d = parse_id(fields[1], line_no)?;
        if has_weight {
            let w: f32 = fields[2].parse().map_err(|_| FormatError::Parse {
                line: line_no,
                message: format!("invalid weight `{}`", fields[2]),
            })?;
            weights.push(w);
        }
        if let Some((n, _)) = declared {
            let id = s.max(d);
            if id as usize >= n {
                return Err(FormatError::Range {
                    line: line_no,
                    id: id as u64,
                    limit: n as u64,
                });
            }
        }
        max_id = max_id.max(Some(s.max(d)));
        edges.push((s, d));
    }
    let n = match (declared, max_id) {
        (Some((n, _)), _) => n,
        (None, Some(id)) => id as usize + 1,
        (None, None) => 0,
    };
    let el = if weighted == Some(true) {
        EdgeList::with_weights(n, edges, weights)?
    } else {
        EdgeList::new(n, edges)?
    };
    Ok(el)
}

fn parse_nodes_header(comment: &str, line: usize) -> Result<Option<usize>> {
    let Some(rest) = comment.trim_start().strip_prefix("Nodes:") else {
        return Ok(None);
    };
    let token = rest.split_whitespace().next().unwrap_or("");
    let n: u64 = token.parse().map_err(|_| FormatError::Parse {
        line,
        message: format!("invalid vertex count `{token}`"),
    })?;
    if n > MAX_VERTICES as u64 {
        return Err(FormatError::Range {
            line,
            id: n - 1,
            limit: MAX_VERTICES as u64,
        });
    }
    Ok(Some(n as usize))
}

fn parse_id(token: &str, line: usize) -> Result<u32> {
    let id: u64 = token.parse().map_err(|_| FormatError::Parse {
        line,
        message: format!("invalid vertex id `{token}`"),
    })?;
    if id >= MAX_VERTICES as u64 {
        return Err(FormatError::Range {
            line,
            id,
            limit: MAX_VERTICES as u64,
        });
    }
    Ok(id as u32)
}

/// Writes `g` with a `# Nodes:` header so isolated trailing vertices survive
/// a round trip.
pub fn write_edge_list<W: Write>(g: &CsrGraph, mut w: W) -> Result<()> {
    writeln!(w, "# Nodes: {} Edges: {}", g.n(), g.m())?;
    match g.weights() {
        Some(weights) => {
            for ((s, d), x) in g.edges().zip(weights) {
                writeln!(w, "{s} {d} {x}")?;
            }
        }
        None => {
            for (s, d) in g.edges() {
                writeln!(w, "{s} {d}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
