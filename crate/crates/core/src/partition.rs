//! Index-range partitioning and per-(source partition, bin) write offsets.
//!
//! Partition `i` owns vertices `[i*q, (i+1)*q)`; the last partition may be
//! short. Source partitions write into every bin in ascending partition order,
//! so the offset of partition `i` into bin `j` is the number of entries all
//! partitions `< i` place in that bin. Those offsets hand each source
//! partition a private range in every bin, and scatter needs no locks.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Adjacency;
use crate::{par, CsrGraph, Error, Result};

/// 64Ki vertices: 256 KiB of 4-byte values per partition.
pub const DEFAULT_PARTITION_WIDTH: usize = 1 << 16;

#[inline]
pub fn partition_of(v: usize, q: usize) -> usize {
    v / q
}

#[inline]
pub(crate) fn partition_count(n: usize, q: usize) -> usize {
    n.div_ceil(q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLayout {
    n_src: usize,
    n_dst: usize,
    q_src: usize,
    q_dst: usize,
    k_src: usize,
    k_dst: usize,
    bin_updates: Vec<usize>,
    bin_ids: Vec<usize>,
    // [src * k_dst + bin]
    update_contrib: Vec<usize>,
    id_contrib: Vec<usize>,
    write_offset_updates: Vec<usize>,
    write_offset_ids: Vec<usize>,
}

/// Square layout for a graph: sources and destinations share width `q`.
pub fn make_layout(g: &CsrGraph, q: usize) -> Result<PartitionLayout> {
    PartitionLayout::new(g.adjacency(), q, q)
}

impl PartitionLayout {
    /// Layout for a possibly rectangular adjacency with independent source and
    /// destination partition widths.
    pub fn new(adj: Adjacency<'_>, q_src: usize, q_dst: usize) -> Result<Self> {
        if q_src == 0 || q_dst == 0 {
            return Err(Error::Parameter("partition width must be at least 1".into()));
        }
        let n_src = adj.n_src();
        let n_dst = adj.n_dst;
        let k_src = partition_count(n_src, q_src);
        let k_dst = partition_count(n_dst, q_dst);

        let rows: Vec<(Vec<usize>, Vec<usize>)> = par::map_collect((0..k_src).collect(), |_, p| {
            let mut upd = vec![0usize; k_dst];
            let mut ids = vec![0usize; k_dst];
            let lo = p * q_src;
            let hi = (lo + q_src).min(n_src);
            for u in lo..hi {
                let mut prev = usize::MAX;
                for &t in adj.neighbors(u) {
                    let j = partition_of(t as usize, q_dst);
                    ids[j] += 1;
                    if j != prev {
                        upd[j] += 1;
                        prev = j;
                    }
                }
            }
            (upd, ids)
        });

        let mut update_contrib = Vec::with_capacity(k_src * k_dst);
        let mut id_contrib = Vec::with_capacity(k_src * k_dst);
        for (upd, ids) in rows {
            update_contrib.extend(upd);
            id_contrib.extend(ids);
        }
        let (write_offset_updates, bin_updates) = column_prefix(&update_contrib, k_src, k_dst);
        let (write_offset_ids, bin_ids) = column_prefix(&id_contrib, k_src, k_dst);

        Ok(PartitionLayout {
            n_src,
            n_dst,
            q_src,
            q_dst,
            k_src,
            k_dst,
            bin_updates,
            bin_ids,
            update_contrib,
            id_contrib,
            write_offset_updates,
            write_offset_ids,
        })
    }

    /// Partition width; for rectangular layouts this is the source width.
    pub fn q(&self) -> usize {
        self.q_src
    }

    /// Partition count; for rectangular layouts this is the source count.
    pub fn k(&self) -> usize {
        self.k_src
    }

    pub fn n_src(&self) -> usize {
        self.n_src
    }

    pub fn n_dst(&self) -> usize {
        self.n_dst
    }

    pub fn q_src(&self) -> usize {
        self.q_src
    }

    pub fn q_dst(&self) -> usize {
        self.q_dst
    }

    pub fn k_src(&self) -> usize {
        self.k_src
    }

    pub fn k_dst(&self) -> usize {
        self.k_dst
    }

    pub fn bin_updates(&self) -> &[usize] {
        &self.bin_updates
    }

    pub fn bin_ids(&self) -> &[usize] {
        &self.bin_ids
    }

    /// Updates source partition `i` sends to bin `j` (distinct vertices of
    /// `P_i` with at least one out-neighbor in `P_j`).
    pub fn update_contribution(&self, i: usize, j: usize) -> usize {
        self.update_contrib[i * self.k_dst + j]
    }

    /// Destination ids source partition `i` sends to bin `j` (edges `P_i -> P_j`).
    pub fn id_contribution(&self, i: usize, j: usize) -> usize {
        self.id_contrib[i * self.k_dst + j]
    }

    pub fn write_offset_update(&self, i: usize, j: usize) -> usize {
        self.write_offset_updates[i * self.k_dst + j]
    }

    pub fn write_offset_id(&self, i: usize, j: usize) -> usize {
        self.write_offset_ids[i * self.k_dst + j]
    }

    /// Dense `k_src x k_dst` update offsets, row-major by source partition.
    pub fn write_offsets_updates(&self) -> &[usize] {
        &self.write_offset_updates
    }

    pub fn write_offsets_ids(&self) -> &[usize] {
        &self.write_offset_ids
    }

    /// Total updates written per iteration (the compressed edge count).
    pub fn total_updates(&self) -> usize {
        self.bin_updates.iter().sum()
    }

    pub fn total_ids(&self) -> usize {
        self.bin_ids.iter().sum()
    }

    pub(crate) fn update_bin_starts(&self) -> Vec<usize> {
        starts(&self.bin_updates)
    }

    pub(crate) fn id_bin_starts(&self) -> Vec<usize> {
        starts(&self.bin_ids)
    }

    /// Vertex range owned by destination partition `j`.
    pub fn dst_range(&self, j: usize) -> core::ops::Range<usize> {
        let lo = j * self.q_dst;
        lo..(lo + self.q_dst).min(self.n_dst)
    }

    /// Vertex range owned by source partition `i`.
    pub fn src_range(&self, i: usize) -> core::ops::Range<usize> {
        let lo = i * self.q_src;
        lo..(lo + self.q_src).min(self.n_src)
    }
}

fn column_prefix(contrib: &[usize], rows: usize, cols: usize) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; rows * cols];
    let mut totals = vec![0usize; cols];
    for i in 0..rows {
        for j in 0..cols {
            offsets[i * cols + j] = totals[j];
            totals[j] += contrib[i * cols + j];
        }
    }
    (offsets, totals)
}

fn starts(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    out.push(0);
    let mut acc = 0;
    for &s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}
