//! Partition-Node Graph (PNG) layout.
//!
//! For each source partition `p` the PNG stores a small bipartite CSR from
//! destination partitions back to the vertices of `p` that have at least one
//! out-neighbor there. Edges `u -> v` that share `(u, partition(v))` collapse
//! into one, and grouping by destination partition means scatter streams
//! each bin once per source partition.
//!
//! Construction takes two passes over each partition's edges: the first
//! counts compressed edges per destination partition (prefix-summed into the
//! group offsets), the second fills source ids in ascending vertex order.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::Adjacency;
use crate::partition::partition_of;
use crate::{par, Error, PartitionLayout, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Png {
    n_src: usize,
    q_src: usize,
    q_dst: usize,
    k_src: usize,
    k_dst: usize,
    // span of each source partition inside `sources`
    part_start: Vec<usize>,
    // k_src rows of k_dst + 1 offsets, local to the partition's span
    offsets: Vec<usize>,
    sources: Vec<u32>,
}

/// Builds the PNG of `adj` under the partitioning described by `layout`.
pub fn build_png(adj: Adjacency<'_>, layout: &PartitionLayout) -> Png {
    let q_src = layout.q_src();
    let q_dst = layout.q_dst();
    let k_src = layout.k_src();
    let k_dst = layout.k_dst();
    let n_src = adj.n_src();

    let parts: Vec<(Vec<usize>, Vec<u32>)> = par::map_collect((0..k_src).collect(), |_, p| {
        let lo = p * q_src;
        let hi = (lo + q_src).min(n_src);
        let mut offsets = vec![0usize; k_dst + 1];
        for u in lo..hi {
            for_each_dest_partition(adj.neighbors(u), q_dst, |j| offsets[j + 1] += 1);
        }
        for j in 0..k_dst {
            offsets[j + 1] += offsets[j];
        }
        let mut cursor = offsets[..k_dst].to_vec();
        let mut sources = vec![0u32; offsets[k_dst]];
        for u in lo..hi {
            for_each_dest_partition(adj.neighbors(u), q_dst, |j| {
                sources[cursor[j]] = u as u32;
                cursor[j] += 1;
            });
        }
        (offsets, sources)
    });

    let mut part_start = Vec::with_capacity(k_src + 1);
    let mut offsets = Vec::with_capacity(k_src * (k_dst + 1));
    let mut sources = Vec::new();
    part_start.push(0);
    for (o, s) in parts {
        offsets.extend(o);
        sources.extend(s);
        part_start.push(sources.len());
    }
    Png {
        n_src,
        q_src,
        q_dst,
        k_src,
        k_dst,
        part_start,
        offsets,
        sources,
    }
}

/// Calls `f` once per distinct destination partition of a sorted row.
#[inline]
fn for_each_dest_partition(row: &[u32], q_dst: usize, mut f: impl FnMut(usize)) {
    let mut prev = usize::MAX;
    for &t in row {
        let j = partition_of(t as usize, q_dst);
        if j != prev {
            f(j);
            prev = j;
        }
    }
}

impl Png {
    pub fn k_src(&self) -> usize {
        self.k_src
    }

    pub fn k_dst(&self) -> usize {
        self.k_dst
    }

    pub fn q_src(&self) -> usize {
        self.q_src
    }

    pub fn q_dst(&self) -> usize {
        self.q_dst
    }

    /// Total compressed edges `|E'|`.
    pub fn e_prime(&self) -> usize {
        self.sources.len()
    }

    /// `k_dst + 1` local offsets grouping partition `p`'s edges by destination.
    pub fn partition_offsets(&self, p: usize) -> &[usize] {
        let w = self.k_dst + 1;
        &self.offsets[p * w..(p + 1) * w]
    }

    pub fn partition_sources(&self, p: usize) -> &[u32] {
        &self.sources[self.part_start[p]..self.part_start[p + 1]]
    }

    /// Vertices of source partition `p` with an out-neighbor in partition `j`,
    /// ascending.
    pub fn group(&self, p: usize, j: usize) -> &[u32] {
        let o = self.partition_offsets(p);
        &self.partition_sources(p)[o[j]..o[j + 1]]
    }

    /// Vertex range owned by source partition `p`.
    pub fn src_range(&self, p: usize) -> core::ops::Range<usize> {
        let lo = p * self.q_src;
        lo..(lo + self.q_src).min(self.n_src)
    }

    /// Per-(source partition, bin) update write offsets recovered from the
    /// group sizes, row-major by source partition. Matches
    /// [`PartitionLayout::write_offsets_updates`].
    pub fn update_write_offsets(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.k_src * self.k_dst];
        let mut totals = vec![0usize; self.k_dst];
        for p in 0..self.k_src {
            let o = self.partition_offsets(p);
            for j in 0..self.k_dst {
                out[p * self.k_dst + j] = totals[j];
                totals[j] += o[j + 1] - o[j];
            }
        }
        out
    }

    /// `m / |E'|`.
    pub fn compression_ratio(&self, m: usize) -> Result<f64> {
        compression_ratio(self, m)
    }

    /// Every `(source partition, destination partition, source id)` triple in
    /// scatter order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.k_src)
            .flat_map(move |p| (0..self.k_dst).flat_map(move |j| self.group(p, j).iter().map(move |&u| (p, j, u))))
    }

    /// Copy with the `index`-th source of group `(p, j)` removed. Used to check
    /// that validation catches a missing edge.
    pub fn without_edge(&self, p: usize, j: usize, index: usize) -> Result<Png> {
        let o = self.partition_offsets(p);
        if index >= o[j + 1] - o[j] {
            return Err(Error::Parameter(format!("group ({p}, {j}) has no entry {index}")));
        }
        let mut out = self.clone();
        out.sources.remove(self.part_start[p] + o[j] + index);
        for x in &mut out.part_start[p + 1..] {
            *x -= 1;
        }
        let w = self.k_dst + 1;
        for x in &mut out.offsets[p * w + j + 1..(p + 1) * w] {
            *x -= 1;
        }
        Ok(out)
    }
}

/// `m / |E'|`, the average number of original edges per compressed edge.
pub fn compression_ratio(png: &Png, m: usize) -> Result<f64> {
    match (png.e_prime(), m) {
        (0, 0) => Err(Error::Parameter("compression ratio of an edgeless graph".into())),
        (0, _) => Err(Error::Invariant(format!("{m} edges compressed to none"))),
        (e, m) => Ok(m as f64 / e as f64),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MismatchKind {
    /// A vertex-to-partition link of the graph has no PNG edge.
    Missing,
    /// A PNG edge has no backing edge in the graph.
    Unexpected,
    /// The same source appears twice in one destination group.
    Duplicate,
    /// A source sits in a partition that does not own it.
    WrongPartition,
    /// Offsets are not a monotone `k + 1` sequence over the partition's span.
    BadOffsets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PngMismatch {
    pub kind: MismatchKind,
    pub source: u32,
    pub partition: usize,
}

impl fmt::Display for PngMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            MismatchKind::Missing => "missing PNG edge",
            MismatchKind::Unexpected => "unexpected PNG edge",
            MismatchKind::Duplicate => "duplicate PNG edge",
            MismatchKind::WrongPartition => "PNG source outside its partition",
            MismatchKind::BadOffsets => "malformed PNG offsets at",
        };
        write!(f, "{what} ({} -> P{})", self.source, self.partition)
    }
}

impl core::error::Error for PngMismatch {}

/// Summary returned when a PNG matches its graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PngCheck {
    pub e_prime: usize,
}

/// Checks `png` against brute-force enumeration of distinct
/// `(u, partition(v))` pairs of `adj` and reports the first disagreement.
pub fn validate_png(png: &Png, adj: Adjacency<'_>) -> Result<PngCheck, PngMismatch> {
    let mut expected: BTreeSet<(u32, usize)> = BTreeSet::new();
    for u in 0..adj.n_src() {
        for &t in adj.neighbors(u) {
            expected.insert((u as u32, t as usize / png.q_dst));
        }
    }

    for p in 0..png.k_src {
        let o = png.partition_offsets(p);
        let span = png.part_start[p + 1] - png.part_start[p];
        if o[0] != 0 || o[png.k_dst] != span || o.windows(2).any(|w| w[0] > w[1]) {
            return Err(PngMismatch {
                kind: MismatchKind::BadOffsets,
                source: (p * png.q_src) as u32,
                partition: p,
            });
        }
        let owned = png.src_range(p);
        for j in 0..png.k_dst {
            let group = png.group(p, j);
            for (i, &u) in group.iter().enumerate() {
                let err = |kind| PngMismatch {
                    kind,
                    source: u,
                    partition: j,
                };
                if !owned.contains(&(u as usize)) {
                    return Err(err(MismatchKind::WrongPartition));
                }
                if group[..i].contains(&u) {
                    return Err(err(MismatchKind::Duplicate));
                }
                if !expected.remove(&(u, j)) {
                    return Err(err(MismatchKind::Unexpected));
                }
            }
        }
    }
    if let Some(&(source, partition)) = expected.iter().next() {
        return Err(PngMismatch {
            kind: MismatchKind::Missing,
            source,
            partition,
        });
    }
    Ok(PngCheck { e_prime: png.e_prime() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::toy;
    use crate::graph::{build_csr, EdgeList};
    use crate::partition::make_layout;
    use crate::CsrGraph;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn png_of(g: &CsrGraph, q: usize) -> Png {
        build_png(g.adjacency(), &make_layout(g, q).unwrap())
    }

    /// Two-step reference: compress every row to (u, partition) links, then
    /// transpose each source partition's links by destination.
    fn two_step(g: &CsrGraph, q: usize) -> Vec<Vec<Vec<u32>>> {
        let k = g.n().div_ceil(q);
        let mut compressed: Vec<(u32, usize)> = Vec::new();
        for (u, v) in g.edges() {
            let link = (u, v as usize / q);
            if !compressed.contains(&link) {
                compressed.push(link);
            }
        }
        let mut out = vec![vec![Vec::new(); k]; k];
        for (u, j) in compressed {
            out[u as usize / q][j].push(u);
        }
        for row in &mut out {
            for g in row {
                g.sort();
            }
        }
        out
    }

    #[test]
    fn toy_compresses_to_seven() {
        let g = toy();
        let png = png_of(&g, 2);
        assert_eq!(png.e_prime(), 7);
        let triples: Vec<_> = png.triples().map(|(_, j, u)| (u, j)).collect();
        let mut sorted = triples.clone();
        sorted.sort();
        assert_eq!(sorted, vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (3, 2), (5, 0)]);
        let r = png.compression_ratio(g.m()).unwrap();
        assert!((r - 9.0 / 7.0).abs() < 1e-15);
        assert_eq!(png.group(0, 2), &[0, 1]);
        assert_eq!(png.group(1, 2), &[3]);
        assert_eq!(png.group(2, 0), &[5]);
    }

    #[test]
    fn fully_local_rows_compress_to_n() {
        // every vertex points into partition 0 only
        let n = 8;
        let edges = (0..n as u32).flat_map(|u| [(u, 0), (u, 1), (u, 2)]).collect();
        let g = build_csr(&EdgeList::new(n, edges).unwrap()).unwrap();
        let png = png_of(&g, 4);
        assert_eq!(png.e_prime(), n);
        assert_eq!(png.compression_ratio(g.m()).unwrap(), 3.0);
    }

    #[test]
    fn single_partition_counts_non_dangling() {
        let g = toy();
        let png = png_of(&g, 6);
        assert_eq!(png.k_src(), 1);
        assert_eq!(png.e_prime(), 5);
    }

    #[test]
    fn ratio_edge_cases() {
        let g = build_csr(&EdgeList::new(3, vec![(0, 1), (1, 2)]).unwrap()).unwrap();
        assert_eq!(png_of(&g, 1).compression_ratio(g.m()).unwrap(), 1.0);
        let empty = CsrGraph::empty(4);
        assert!(matches!(
            png_of(&empty, 2).compression_ratio(0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            png_of(&empty, 2).compression_ratio(5),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn validation_passes_and_catches_drop() {
        let g = toy();
        let png = png_of(&g, 2);
        assert_eq!(validate_png(&png, g.adjacency()).unwrap().e_prime, 7);
        let broken = png.without_edge(1, 2, 0).unwrap();
        let err = validate_png(&broken, g.adjacency()).unwrap_err();
        assert_eq!(
            err,
            PngMismatch {
                kind: MismatchKind::Missing,
                source: 3,
                partition: 2
            }
        );
        assert!(png.without_edge(1, 1, 0).is_err());

        let empty = CsrGraph::empty(5);
        assert!(validate_png(&png_of(&empty, 2), empty.adjacency()).is_ok());
    }

    #[test]
    fn write_offsets_match_layout() {
        let g = toy();
        let layout = make_layout(&g, 2).unwrap();
        let png = build_png(g.adjacency(), &layout);
        assert_eq!(png.update_write_offsets(), layout.write_offsets_updates());
        assert_eq!(png.e_prime(), layout.total_updates());
    }

    fn arb_graph() -> impl Strategy<Value = CsrGraph> {
        (1usize..80).prop_flat_map(|n| {
            proptest::collection::vec((0..n as u32, 0..n as u32), 0..400)
                .prop_map(move |e| build_csr(&EdgeList::new(n, e).unwrap()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn matches_two_step_reference(g in arb_graph(), q in 1usize..24) {
            let png = png_of(&g, q);
            let reference = two_step(&g, q);
            for (p, row) in reference.iter().enumerate() {
                // destination groups are visited in ascending bin order
                let offs = png.partition_offsets(p);
                prop_assert!(offs.windows(2).all(|w| w[0] <= w[1]));
                for (j, group) in row.iter().enumerate() {
                    prop_assert_eq!(png.group(p, j), group.as_slice());
                }
            }
            prop_assert!(validate_png(&png, g.adjacency()).is_ok());
            let layout = make_layout(&g, q).unwrap();
            prop_assert_eq!(png.e_prime(), layout.total_updates());
            prop_assert_eq!(png.update_write_offsets(), layout.write_offsets_updates().to_vec());
        }

        #[test]
        fn doubling_width_never_adds_edges(g in arb_graph(), q in 1usize..16) {
            prop_assert!(png_of(&g, 2 * q).e_prime() <= png_of(&g, q).e_prime());
        }
    }
}
