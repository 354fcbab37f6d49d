//! Destination bins for partition-centric propagation.
//!
//! Bin `j` holds everything sent to destination partition `j`: one update
//! value per `(source vertex, j)` link and, for each such link, the run of
//! the source's out-neighbors inside `P_j`. The first id of each run carries
//! the MSB flag, so the gather step knows when to move on to the next update.
//! Ids (and weights) are written once; updates are rewritten every scatter.

use alloc::vec;
use alloc::vec::Vec;

use crate::analytics::{PhaseTraffic, INDEX_BYTES};
use crate::graph::Adjacency;
use crate::{par, Error, PartitionLayout, Png, Result, Value};

pub const MSB: u32 = 1 << 31;
pub const ID_MASK: u32 = !MSB;

/// Packs an id with the run-start flag.
#[inline]
pub fn msb_encode(id: u32, flag: bool) -> Result<u32> {
    if id & MSB != 0 {
        return Err(Error::VertexOutOfRange {
            id: id as u64,
            limit: MSB as u64,
        });
    }
    Ok(id | ((flag as u32) << 31))
}

#[inline]
pub fn msb_decode(enc: u32) -> (u32, bool) {
    (enc & ID_MASK, enc & MSB != 0)
}

/// Which gather loop to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GatherKind {
    /// Tests the flag and pops the next update when it is set.
    Branching,
    /// Adds the flag bit to the update cursor; no data-dependent branch.
    #[default]
    BranchAvoiding,
}

#[derive(Clone, Debug)]
pub struct Bins<V> {
    k_src: usize,
    k_dst: usize,
    q_dst: usize,
    update_start: Vec<usize>,
    id_start: Vec<usize>,
    update_offsets: Vec<usize>,
    id_offsets: Vec<usize>,
    updates: Vec<V>,
    dest_ids: Vec<u32>,
    weights: Option<Vec<V>>,
}

impl<V: Value> Bins<V> {
    /// Zeroed bins sized by `layout`; `weighted` reserves a weight per id.
    pub fn new(layout: &PartitionLayout, weighted: bool) -> Self {
        let updates = vec![V::ZERO; layout.total_updates()];
        let m = layout.total_ids();
        Bins {
            k_src: layout.k_src(),
            k_dst: layout.k_dst(),
            q_dst: layout.q_dst(),
            update_start: layout.update_bin_starts(),
            id_start: layout.id_bin_starts(),
            update_offsets: layout.write_offsets_updates().to_vec(),
            id_offsets: layout.write_offsets_ids().to_vec(),
            updates,
            dest_ids: vec![0; m],
            weights: weighted.then(|| vec![V::ZERO; m]),
        }
    }

    /// Assembles bins directly from per-bin contents. Every non-empty id bin
    /// must start with a flagged id and hold exactly as many flags as updates.
    pub fn from_bins(q_dst: usize, ids: Vec<Vec<u32>>, updates: Vec<Vec<V>>) -> Result<Self> {
        if ids.len() != updates.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                found: updates.len(),
            });
        }
        let k = ids.len();
        let bins = Bins {
            k_src: 1,
            k_dst: k,
            q_dst,
            update_start: prefix(updates.iter().map(Vec::len)),
            id_start: prefix(ids.iter().map(Vec::len)),
            update_offsets: vec![0; k],
            id_offsets: vec![0; k],
            updates: updates.into_iter().flatten().collect(),
            dest_ids: ids.into_iter().flatten().collect(),
            weights: None,
        };
        bins.check_well_formed()?;
        Ok(bins)
    }

    pub fn k_dst(&self) -> usize {
        self.k_dst
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn update_bin(&self, j: usize) -> &[V] {
        &self.updates[self.update_start[j]..self.update_start[j + 1]]
    }

    pub fn id_bin(&self, j: usize) -> &[u32] {
        &self.dest_ids[self.id_start[j]..self.id_start[j + 1]]
    }

    pub fn weight_bin(&self, j: usize) -> Option<&[V]> {
        self.weights
            .as_ref()
            .map(|w| &w[self.id_start[j]..self.id_start[j + 1]])
    }

    fn check_well_formed(&self) -> Result<()> {
        for j in 0..self.k_dst {
            let ids = self.id_bin(j);
            if let Some(&first) = ids.first() {
                if first & MSB == 0 {
                    return Err(Error::MalformedBin { bin: j });
                }
            }
            let flags = ids.iter().filter(|&&id| id & MSB != 0).count();
            let expected = self.update_start[j + 1] - self.update_start[j];
            if flags != expected {
                return Err(Error::CapacityOverflow {
                    bin: j,
                    expected,
                    found: flags,
                });
            }
        }
        Ok(())
    }
}

fn prefix(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0];
    let mut acc = 0;
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

/// Fills the destination-id (and weight) bins in PNG scatter order.
///
/// Inside bin `j`, runs appear by source partition, then by source vertex;
/// each run lists the source's out-neighbors in `P_j` in ascending order with
/// the first one flagged.
pub fn write_dest_ids<V: Value>(adj: Adjacency<'_>, png: &Png, bins: &mut Bins<V>) -> Result<PhaseTraffic> {
    let k_src = bins.k_src;
    let k_dst = bins.k_dst;
    let q_dst = bins.q_dst;
    if png.k_src() != k_src || png.k_dst() != k_dst || png.e_prime() != bins.updates.len() {
        return Err(Error::Invariant("bins and PNG come from different layouts".into()));
    }
    if bins.weights.is_some() && adj.weights.is_none() {
        return Err(Error::Parameter("weighted bins need edge weights".into()));
    }
    let id_regions = par::split_regions(&mut bins.dest_ids, &bins.id_start, &bins.id_offsets, k_src, k_dst);
    let weight_regions: Vec<Option<Vec<&mut [V]>>> = match bins.weights.as_mut() {
        Some(w) => par::split_regions(w, &bins.id_start, &bins.id_offsets, k_src, k_dst)
            .into_iter()
            .map(Some)
            .collect(),
        None => (0..k_src).map(|_| None).collect(),
    };
    let work: Vec<_> = id_regions.into_iter().zip(weight_regions).collect();

    let traffic = par::try_map_reduce(work, |p, (mut ids, mut weights)| {
        let mut t = PhaseTraffic::default();
        for j in 0..k_dst {
            let region = &mut ids[j];
            let mut wregion = weights.as_mut().map(|w| &mut w[j]);
            let lo = (j * q_dst) as u32;
            let hi = ((j + 1) * q_dst).min(adj.n_dst) as u32;
            let mut cursor = 0usize;
            for &u in png.group(p, j) {
                let range = adj.edge_range(u as usize);
                let row = &adj.targets[range.clone()];
                let start = row.partition_point(|&t| t < lo);
                let end = row.partition_point(|&t| t < hi);
                for (i, e) in (start..end).enumerate() {
                    let Some(slot) = region.get_mut(cursor) else {
                        return Err(Error::CapacityOverflow {
                            bin: j,
                            expected: cursor,
                            found: cursor + (end - start - i),
                        });
                    };
                    *slot = msb_encode(row[e], i == 0)?;
                    if let (Some(w), Some(src)) = (wregion.as_deref_mut(), adj.weights) {
                        w[cursor] = V::from_f64(src.get(range.start + e));
                    }
                    cursor += 1;
                }
                t.bytes_read += (end - start) as u64 * INDEX_BYTES;
            }
            if cursor != region.len() {
                return Err(Error::CapacityOverflow {
                    bin: j,
                    expected: region.len(),
                    found: cursor,
                });
            }
            let group = png.group(p, j).len() as u64;
            t.bytes_read += group * INDEX_BYTES;
            t.ids += cursor as u64;
            t.bytes_written += cursor as u64 * INDEX_BYTES;
            if wregion.is_some() {
                t.bytes_written += (cursor * V::BYTES) as u64;
            }
        }
        t.bytes_read += k_dst as u64 * INDEX_BYTES;
        Ok(t)
    })?;
    bins.check_well_formed()?;
    Ok(traffic)
}

/// Writes `pr[u]` for every PNG edge into the update bins, one destination
/// group at a time.
pub fn scatter<V: Value>(png: &Png, pr: &[V], bins: &mut Bins<V>) -> PhaseTraffic {
    let k_src = bins.k_src;
    let k_dst = bins.k_dst;
    let regions = par::split_regions(
        &mut bins.updates,
        &bins.update_start,
        &bins.update_offsets,
        k_src,
        k_dst,
    );
    par::map_reduce(regions, |p, mut regions| {
        let mut t = PhaseTraffic::default();
        for (j, region) in regions.iter_mut().enumerate() {
            let group = png.group(p, j);
            debug_assert_eq!(group.len(), region.len());
            for (slot, &u) in region.iter_mut().zip(group) {
                *slot = pr[u as usize];
            }
            if !group.is_empty() {
                t.bin_switches += 1;
            }
            t.updates += group.len() as u64;
        }
        let e = t.updates;
        let owned = png.src_range(p).len() as u64;
        t.bytes_read = (k_dst as u64 + e) * INDEX_BYTES + owned * V::BYTES as u64;
        t.bytes_written = e * V::BYTES as u64;
        t
    })
}

/// Accumulates bin `bin` into `out`, which covers vertices `base..`.
///
/// Pops a new update whenever an id carries the flag; weights, when present,
/// scale the update per destination.
pub fn gather_bin_branching<V: Value>(
    bin: usize,
    ids: &[u32],
    updates: &[V],
    weights: Option<&[V]>,
    base: usize,
    out: &mut [V],
) -> Result<()> {
    check_bin(bin, ids, updates)?;
    let mut next = 0usize;
    let mut update = V::ZERO;
    match weights {
        None => {
            for &id in ids {
                if id & MSB != 0 {
                    update = updates[next];
                    next += 1;
                }
                out[(id & ID_MASK) as usize - base] += update;
            }
        }
        Some(w) => {
            for (&id, &w) in ids.iter().zip(w) {
                if id & MSB != 0 {
                    update = updates[next];
                    next += 1;
                }
                out[(id & ID_MASK) as usize - base] += w * update;
            }
        }
    }
    Ok(())
}

/// Same result as [`gather_bin_branching`], bit for bit, but the update
/// cursor starts at -1 and advances by the flag bit before every read.
pub fn gather_bin_branch_avoiding<V: Value>(
    bin: usize,
    ids: &[u32],
    updates: &[V],
    weights: Option<&[V]>,
    base: usize,
    out: &mut [V],
) -> Result<()> {
    check_bin(bin, ids, updates)?;
    let mut cursor = usize::MAX;
    match weights {
        None => {
            for &id in ids {
                cursor = cursor.wrapping_add((id >> 31) as usize);
                out[(id & ID_MASK) as usize - base] += updates[cursor];
            }
        }
        Some(w) => {
            for (&id, &w) in ids.iter().zip(w) {
                cursor = cursor.wrapping_add((id >> 31) as usize);
                out[(id & ID_MASK) as usize - base] += w * updates[cursor];
            }
        }
    }
    Ok(())
}

#[inline]
fn check_bin<V>(bin: usize, ids: &[u32], updates: &[V]) -> Result<()> {
    match ids.first() {
        Some(&first) if first & MSB == 0 => Err(Error::MalformedBin { bin }),
        None if !updates.is_empty() => Err(Error::CapacityOverflow {
            bin,
            expected: 0,
            found: updates.len(),
        }),
        _ => Ok(()),
    }
}

/// Zeroes `pr_out` and gathers every bin into it.
pub fn gather<V: Value>(bins: &Bins<V>, pr_out: &mut [V], kind: GatherKind) -> Result<PhaseTraffic> {
    if pr_out.len() > bins.k_dst * bins.q_dst || pr_out.len() + bins.q_dst <= bins.k_dst * bins.q_dst {
        return Err(Error::DimensionMismatch {
            expected: bins.k_dst * bins.q_dst,
            found: pr_out.len(),
        });
    }
    let chunks: Vec<&mut [V]> = pr_out.chunks_mut(bins.q_dst.max(1)).collect();
    par::try_map_reduce(chunks, |j, out| {
        out.fill(V::ZERO);
        gather_partition(bins, j, out, kind)
    })
}

/// Gathers bin `j` into `out`, the slice of partition `j`, and returns the
/// traffic of that bin.
pub(crate) fn gather_partition<V: Value>(
    bins: &Bins<V>,
    j: usize,
    out: &mut [V],
    kind: GatherKind,
) -> Result<PhaseTraffic> {
    let ids = bins.id_bin(j);
    let updates = bins.update_bin(j);
    let weights = bins.weight_bin(j);
    let base = j * bins.q_dst;
    match kind {
        GatherKind::Branching => gather_bin_branching(j, ids, updates, weights, base, out)?,
        GatherKind::BranchAvoiding => gather_bin_branch_avoiding(j, ids, updates, weights, base, out)?,
    }
    let mut read = ids.len() as u64 * INDEX_BYTES + (updates.len() * V::BYTES) as u64;
    if let Some(w) = weights {
        read += (w.len() * V::BYTES) as u64;
    }
    Ok(PhaseTraffic {
        bytes_read: read,
        bytes_written: (out.len() * V::BYTES) as u64,
        bin_switches: 0,
        updates: updates.len() as u64,
        ids: ids.len() as u64,
    })
}

/// Convenience wrapper over [`gather`] with the branching loop.
pub fn gather_branching<V: Value>(bins: &Bins<V>, pr_out: &mut [V]) -> Result<PhaseTraffic> {
    gather(bins, pr_out, GatherKind::Branching)
}

/// Convenience wrapper over [`gather`] with the branch-avoiding loop.
pub fn gather_branch_avoiding<V: Value>(bins: &Bins<V>, pr_out: &mut [V]) -> Result<PhaseTraffic> {
    gather(bins, pr_out, GatherKind::BranchAvoiding)
}
