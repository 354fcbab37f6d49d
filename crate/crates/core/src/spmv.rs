//! Partition-centric sparse matrix-vector products.
//!
//! Columns play the role of source vertices and rows of destinations, each
//! partitioned with its own width. Scatter walks column partitions and writes
//! `x[j]` once per destination row partition; gather walks row partitions and
//! multiplies every update by the matrix entry stored next to its row id.

use alloc::vec;
use alloc::vec::Vec;

use crate::analytics::PhaseTraffic;
use crate::bins::{self, Bins, GatherKind};
use crate::png::build_png;
use crate::{Adjacency, Error, PartitionLayout, Png, Result, Value, Weights};

/// Row-major compressed sparse matrix with `f64` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; repeated coordinates are
    /// summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(u32, u32, f64)]) -> Result<Self> {
        check_dim(rows)?;
        check_dim(cols)?;
        let mut sorted: Vec<(u32, u32, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r as usize >= rows {
                return Err(Error::VertexOutOfRange {
                    id: r as u64,
                    limit: rows as u64,
                });
            }
            if c as usize >= cols {
                return Err(Error::VertexOutOfRange {
                    id: c as u64,
                    limit: cols as u64,
                });
            }
            if !v.is_finite() {
                return Err(Error::InvalidGraph(alloc::format!("non-finite entry at ({r}, {c})")));
            }
            sorted.push((r, c, v));
        }
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            row_offsets[r as usize + 1] += 1;
            col_indices.push(c);
            values.push(v);
        }
        for i in 0..rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Takes CSR arrays as they are after checking that offsets are
    /// monotone, column indices are in range and strictly increasing per row.
    pub fn from_csr(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_dim(rows)?;
        check_dim(cols)?;
        if row_offsets.len() != rows + 1 {
            return Err(Error::DimensionMismatch {
                expected: rows + 1,
                found: row_offsets.len(),
            });
        }
        if col_indices.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: col_indices.len(),
                found: values.len(),
            });
        }
        if row_offsets[0] != 0 || row_offsets[rows] != col_indices.len() {
            return Err(Error::InvalidGraph("row offsets do not span the entries".into()));
        }
        if let Some(i) = row_offsets.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidGraph(alloc::format!("row offsets decrease at row {i}")));
        }
        for i in 0..rows {
            let row = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if let Some(&c) = row.iter().find(|&&c| c as usize >= cols) {
                return Err(Error::VertexOutOfRange {
                    id: c as u64,
                    limit: cols as u64,
                });
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(alloc::format!("row {i} is not strictly sorted")));
            }
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for e in self.row_offsets[i]..self.row_offsets[i + 1] {
                d[i * self.cols + self.col_indices[e] as usize] = self.values[e];
            }
        }
        d
    }

    /// Column-major arrays: `(col_offsets, row_indices, values)`.
    fn to_csc(&self) -> (Vec<usize>, Vec<u32>, Vec<f64>) {
        let mut offsets = vec![0usize; self.cols + 1];
        for &c in &self.col_indices {
            offsets[c as usize + 1] += 1;
        }
        for j in 0..self.cols {
            offsets[j + 1] += offsets[j];
        }
        let mut cursor = offsets.clone();
        let mut rows = vec![0u32; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            for e in self.row_offsets[i]..self.row_offsets[i + 1] {
                let c = self.col_indices[e] as usize;
                rows[cursor[c]] = i as u32;
                vals[cursor[c]] = self.values[e];
                cursor[c] += 1;
            }
        }
        (offsets, rows, vals)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d > crate::MAX_VERTICES {
        return Err(Error::Parameter(alloc::format!(
            "dimension {d} exceeds {}",
            crate::MAX_VERTICES
        )));
    }
    Ok(())
}

/// Preprocessed layout for repeated products with one matrix.
#[derive(Clone, Debug)]
pub struct SpmvPlan<V: Value> {
    rows: usize,
    cols: usize,
    layout: PartitionLayout,
    png: Png,
    bins: Bins<V>,
    init: PhaseTraffic,
}

impl<V: Value> SpmvPlan<V> {
    /// Rows are split into partitions of `q_row`, columns into `q_col`.
    /// Row ids and matrix entries are binned once here.
    pub fn new(a: &SparseMatrix, q_row: usize, q_col: usize) -> Result<Self> {
        let (offsets, targets, values) = a.to_csc();
        let adj = Adjacency {
            offsets: &offsets,
            targets: &targets,
            weights: Some(Weights::F64(&values)),
            n_dst: a.rows,
        };
        let layout = PartitionLayout::new(adj, q_col, q_row)?;
        let png = build_png(adj, &layout);
        let mut bins = Bins::new(&layout, true);
        let init = bins::write_dest_ids(adj, &png, &mut bins)?;
        Ok(SpmvPlan {
            rows: a.rows,
            cols: a.cols,
            layout,
            png,
            bins,
            init,
        })
    }

    pub fn layout(&self) -> &PartitionLayout {
        &self.layout
    }

    pub fn png(&self) -> &Png {
        &self.png
    }

    pub fn init_traffic(&self) -> PhaseTraffic {
        self.init
    }

    /// `y = A x`, returning scatter and gather traffic.
    pub fn multiply(&mut self, x: &[V], y: &mut [V]) -> Result<(PhaseTraffic, PhaseTraffic)> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: y.len(),
            });
        }
        let scatter = bins::scatter(&self.png, x, &mut self.bins);
        let gather = if self.rows == 0 {
            PhaseTraffic::default()
        } else {
            bins::gather(&self.bins, y, GatherKind::BranchAvoiding)?
        };
        Ok((scatter, gather))
    }
}

/// One-shot `A x` through a fresh [`SpmvPlan`].
pub fn pcpm_spmv<V: Value>(a: &SparseMatrix, x: &[V], q_row: usize, q_col: usize) -> Result<Vec<V>> {
    if x.len() != a.cols {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            found: x.len(),
        });
    }
    let mut plan = SpmvPlan::new(a, q_row, q_col)?;
    let mut y = vec![V::ZERO; a.rows];
    plan.multiply(x, &mut y)?;
    Ok(y)
}

/// Dense row-major product, summing each row in column order.
pub fn dense_oracle_spmv(rows: usize, cols: usize, a: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if a.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            found: a.len(),
        });
    }
    if x.len() != cols {
        return Err(Error::DimensionMismatch {
            expected: cols,
            found: x.len(),
        });
    }
    Ok((0..rows)
        .map(|i| a[i * cols..(i + 1) * cols].iter().zip(x).map(|(a, x)| a * x).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::toy;
    use crate::pcpm::PcpmEngine;
    use proptest::prelude::*;

    fn identity(n: usize) -> SparseMatrix {
        let t: Vec<_> = (0..n as u32).map(|i| (i, i, 1.0)).collect();
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn identity_product() {
        let y: Vec<f64> = pcpm_spmv(&identity(3), &[1.0, 2.0, 3.0], 2, 2).unwrap();
        assert_eq!(y, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn zero_matrix() {
        let a = SparseMatrix::from_triplets(4, 3, &[]).unwrap();
        let y: Vec<f64> = pcpm_spmv(&a, &[1.0, 2.0, 3.0], 2, 2).unwrap();
        assert_eq!(y, vec![0.0; 4]);
    }

    #[test]
    fn two_by_two() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)]).unwrap();
        let y: Vec<f64> = pcpm_spmv(&a, &[1.0, 1.0], 1, 1).unwrap();
        assert_eq!(y, vec![3.0, 7.0]);
        let d = dense_oracle_spmv(2, 2, &a.to_dense(), &[1.0, 1.0]).unwrap();
        assert_eq!(d, vec![3.0, 7.0]);
    }

    #[test]
    fn oracle_trivial_cases() {
        assert_eq!(
            dense_oracle_spmv(3, 3, &identity(3).to_dense(), &[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(dense_oracle_spmv(2, 3, &[0.0; 6], &[1.0; 3]).unwrap(), vec![0.0; 2]);
        assert!(dense_oracle_spmv(2, 2, &[0.0; 3], &[1.0; 2]).is_err());
    }

    #[test]
    fn duplicates_sum() {
        let a = SparseMatrix::from_triplets(1, 2, &[(0, 1, 1.5), (0, 1, 2.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.values(), &[3.5]);
    }

    #[test]
    fn dimension_mismatch() {
        let a = identity(3);
        assert!(matches!(
            pcpm_spmv::<f64>(&a, &[1.0, 2.0], 2, 2),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn bad_csr_rejected() {
        assert!(SparseMatrix::from_csr(2, 2, vec![0, 2, 1], vec![0], vec![1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn random_64_by_48() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut t = Vec::new();
        for i in 0..64u32 {
            for j in 0..48u32 {
                if rng.next_u32() % 10 == 0 {
                    t.push((i, j, (rng.next_u32() % 2001) as f64 / 1000.0 - 1.0));
                }
            }
        }
        let a = SparseMatrix::from_triplets(64, 48, &t).unwrap();
        let x: Vec<f64> = (0..48).map(|i| (i as f64 * 0.37).sin()).collect();
        let y = pcpm_spmv(&a, &x, 8, 16).unwrap();
        let d = dense_oracle_spmv(64, 48, &a.to_dense(), &x).unwrap();
        for (a, b) in y.iter().zip(&d) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn pagerank_iteration_as_product() {
        // next = (1-d)/n + d * A^T * (pr / deg), with A^T[v][u] = 1 for u -> v
        let g = toy();
        let n = g.n();
        let d = 0.85;
        let deg = g.out_degrees();
        let t: Vec<_> = g.edges().map(|(u, v)| (v, u, d)).collect();
        let at = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let spr: Vec<f64> = (0..n).map(|v| (1.0 / n as f64) / deg.divisor(v) as f64).collect();
        let y = pcpm_spmv(&at, &spr, 2, 2).unwrap();
        let via_spmv: Vec<f64> = y.iter().map(|y| (1.0 - d) / n as f64 + y).collect();

        let mut e = PcpmEngine::<f64>::new(&g, 2, d).unwrap();
        e.scatter();
        e.gather_apply().unwrap();
        let scaled = e.scaled();
        for v in 0..n {
            let unscaled = scaled[v] * deg.divisor(v) as f64;
            assert!((unscaled - via_spmv[v]).abs() <= 1e-6);
        }
    }

    proptest! {
        #[test]
        fn matches_dense(
            rows in 1usize..40,
            cols in 1usize..40,
            q_row in 1usize..9,
            q_col in 1usize..9,
            cells in proptest::collection::vec((0u32..40, 0u32..40, -4.0f64..4.0), 0..200),
        ) {
            let t: Vec<_> = cells
                .into_iter()
                .map(|(r, c, v)| (r % rows as u32, c % cols as u32, v))
                .collect();
            let a = SparseMatrix::from_triplets(rows, cols, &t).unwrap();
            let x: Vec<f64> = (0..cols).map(|i| 1.0 + i as f64 * 0.25).collect();
            let y = pcpm_spmv(&a, &x, q_row, q_col).unwrap();
            let d = dense_oracle_spmv(rows, cols, &a.to_dense(), &x).unwrap();
            for (a, b) in y.iter().zip(&d) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
