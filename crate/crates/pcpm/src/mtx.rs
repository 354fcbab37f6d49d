//! Matrix Market coordinate files (`real`, `integer` or `pattern`;
//! `general` or `symmetric`). Indices are 1-based on disk.

use std::io::BufRead;

use pcpm_core::spmv::SparseMatrix;
use pcpm_core::{CsrGraph, EdgeList, MAX_VERTICES};

use crate::error::{FormatError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate();
    let (header_no, header) = match lines.next() {
        Some((i, l)) => (i + 1, l?),
        None => return Err(parse_err(1, "empty file")),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(
            header_no,
            "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(header_no, &format!("unsupported field `{other}`"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(header_no, &format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut last_line = header_no;
    for (i, line) in lines {
        let line_no = i + 1;
        last_line = line_no;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((rows, cols, _)) = size else {
            if fields.len() != 3 {
                return Err(parse_err(line_no, "expected `rows cols nnz`"));
            }
            let rows = parse_dim(fields[0], line_no)?;
            let cols = parse_dim(fields[1], line_no)?;
            let nnz: usize = fields[2]
                .parse()
                .map_err(|_| parse_err(line_no, "invalid entry count"))?;
            if symmetric && rows != cols {
                return Err(parse_err(line_no, "symmetric matrix must be square"));
            }
            size = Some((rows, cols, nnz));
            triplets.reserve(nnz.min(1 << 24));
            continue;
        };
        let want = if field == Field::Pattern { 2 } else { 3 };
        if fields.len() != want {
            return Err(parse_err(
                line_no,
                &format!("expected {want} fields, found {}", fields.len()),
            ));
        }
        let r = parse_index(fields[0], rows, line_no)?;
        let c = parse_index(fields[1], cols, line_no)?;
        let v = match field {
            Field::Pattern => 1.0,
            Field::Integer => fields[2]
                .parse::<i64>()
                .map_err(|_| parse_err(line_no, "invalid integer value"))? as f64,
            Field::Real => fields[2]
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, "invalid real value"))?,
        };
        triplets.push((r, c, v));
        if symmetric && r != c {
            triplets.push((c, r, v));
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(last_line, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|&&(r, c, _)| r >= c).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(parse_err(last_line, &format!("declared {nnz} entries, found {stored}")));
    }
    Ok(SparseMatrix::from_triplets(rows, cols, &triplets)?)
}

/// Square matrix as a graph: entry `(i, j)` becomes edge `i -> j`, its value
/// the edge weight.
pub fn matrix_to_graph(a: &SparseMatrix) -> Result<CsrGraph> {
    if a.rows() != a.cols() {
        return Err(FormatError::Graph(pcpm_core::Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        }));
    }
    let mut edges = Vec::with_capacity(a.nnz());
    let mut weights = Vec::with_capacity(a.nnz());
    for i in 0..a.rows() {
        for e in a.row_offsets()[i]..a.row_offsets()[i + 1] {
            edges.push((i as u32, a.col_indices()[e]));
            weights.push(a.values()[e] as f32);
        }
    }
    Ok(CsrGraph::from_edge_list(&EdgeList::with_weights(
        a.rows(),
        edges,
        weights,
    )?)?)
}

fn parse_err(line: usize, message: &str) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_dim(token: &str, line: usize) -> Result<usize> {
    let d: u64 = token.parse().map_err(|_| parse_err(line, "invalid dimension"))?;
    if d > MAX_VERTICES as u64 {
        return Err(FormatError::Range {
            line,
            id: d,
            limit: MAX_VERTICES as u64,
        });
    }
    Ok(d as usize)
}

fn parse_index(token: &str, dim: usize, line: usize) -> Result<u32> {
    let i: u64 = token.parse().map_err(|_| parse_err(line, "invalid index"))?;
    if i == 0 || i > dim as u64 {
        return Err(FormatError::Range {
            line,
            id: i,
            limit: dim as u64 + 1,
        });
    }
    Ok((i - 1) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<SparseMatrix> {
        read_matrix_market(s.as_bytes())
    }

    #[test]
    fn general_real() {
        let a = read("%%MatrixMarket matrix coordinate real general\n% c\n2 3 3\n1 1 1.5\n2 3 -2\n1 2 4\n").unwrap();
        assert_eq!((a.rows(), a.cols(), a.nnz()), (2, 3, 3));
        assert_eq!(a.to_dense(), vec![1.5, 4.0, 0.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn symmetric_pattern() {
        let a = read("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 3\n").unwrap();
        assert_eq!(a.to_dense(), vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn integer_values() {
        let a = read("%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 7\n").unwrap();
        assert_eq!(a.values(), &[7.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read(""), Err(FormatError::Parse { line: 1, .. })));
        assert!(read("%%MatrixMarket matrix array real general\n1 1\n1\n").is_err());
        assert!(matches!(
            read("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1\n"),
            Err(FormatError::Range { line: 3, .. })
        ));
        assert!(matches!(
            read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"),
            Err(FormatError::Parse { .. })
        ));
        assert!(matches!(
            read("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n"),
            Err(FormatError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn to_graph() {
        let a = read("%%MatrixMarket matrix coordinate pattern general\n3 3 2\n1 2\n3 1\n").unwrap();
        let g = matrix_to_graph(&a).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 0)]);
    }
}
