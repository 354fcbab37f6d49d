//! Directed graphs in compressed sparse row form.
//!
//! Vertex ids are `u32` with the most significant bit reserved for run
//! demarcation in destination bins, so a graph holds at most
//! [`MAX_VERTICES`] vertices. Duplicate edges collapse at build time (their
//! weights are summed); self-loops are kept.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Exclusive upper bound on vertex ids (and the largest admissible `n`).
pub const MAX_VERTICES: usize = 1 << 31;

/// Raw directed edges as read from a file or produced by a generator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
    /// Per-edge weights aligned with `edges`, if the input carried any.
    pub weights: Option<Vec<f32>>,
}

impl EdgeList {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let el = EdgeList {
            n,
            edges,
            weights: None,
        };
        el.validate()?;
        Ok(el)
    }

    pub fn with_weights(n: usize, edges: Vec<(u32, u32)>, weights: Vec<f32>) -> Result<Self> {
        let el = EdgeList {
            n,
            edges,
            weights: Some(weights),
        };
        el.validate()?;
        Ok(el)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > MAX_VERTICES {
            return Err(Error::VertexOutOfRange {
                id: self.n as u64 - 1,
                limit: MAX_VERTICES as u64,
            });
        }
        if let Some(w) = &self.weights {
            if w.len() != self.edges.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.edges.len(),
                    found: w.len(),
                });
            }
        }
        for &(s, d) in &self.edges {
            let id = s.max(d);
            if id as usize >= self.n {
                return Err(Error::VertexOutOfRange {
                    id: id as u64,
                    limit: self.n as u64,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Borrowed view of a source-major adjacency whose targets live in a
/// (possibly different) id space of `n_dst` vertices.
#[derive(Clone, Copy, Debug)]
pub struct Adjacency<'a> {
    pub offsets: &'a [usize],
    pub targets: &'a [u32],
    pub weights: Option<Weights<'a>>,
    pub n_dst: usize,
}

/// Edge weights in either storage width.
#[derive(Clone, Copy, Debug)]
pub enum Weights<'a> {
    F32(&'a [f32]),
    F64(&'a [f64]),
}

impl Weights<'_> {
    #[inline]
    pub fn get(&self, e: usize) -> f64 {
        match self {
            Weights::F32(w) => w[e] as f64,
            Weights::F64(w) => w[e],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Weights::F32(w) => w.len(),
            Weights::F64(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<'a> Adjacency<'a> {
    #[inline]
    pub fn n_src(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &'a [u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn edge_range(&self, u: usize) -> core::ops::Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }
}

/// Compressed sparse row adjacency: `targets[offsets[v]..offsets[v + 1]]`
/// are the out-neighbors of `v`, sorted and free of duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Option<Vec<f32>>,
}

impl CsrGraph {
    /// An edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        CsrGraph {
            n,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: None,
        }
    }

    /// Assembles a graph from raw arrays, checking every structural invariant.
    pub fn from_parts(n: usize, offsets: Vec<usize>, targets: Vec<u32>, weights: Option<Vec<f32>>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::VertexOutOfRange {
                id: n as u64 - 1,
                limit: MAX_VERTICES as u64,
            });
        }
        if offsets.len() != n + 1 {
            return Err(Error::InvalidGraph(format!(
                "expected {} offsets, found {}",
                n + 1,
                offsets.len()
            )));
        }
        if offsets[0] != 0 || offsets[n] != targets.len() {
            return Err(Error::InvalidGraph(format!("offsets must span [0, {}]", targets.len())));
        }
        if let Some(w) = &weights {
            if w.len() != targets.len() {
                return Err(Error::DimensionMismatch {
                    expected: targets.len(),
                    found: w.len(),
                });
            }
        }
        for v in 0..n {
            if offsets[v] > offsets[v + 1] {
                return Err(Error::InvalidGraph(format!("offsets decrease at vertex {v}")));
            }
            let row = &targets[offsets[v]..offsets[v + 1]];
            if let Some(&t) = row.iter().find(|&&t| t as usize >= n) {
                return Err(Error::VertexOutOfRange {
                    id: t as u64,
                    limit: n as u64,
                });
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "adjacency of vertex {v} is not strictly increasing"
                )));
            }
        }
        Ok(CsrGraph {
            n,
            offsets,
            targets,
            weights,
        })
    }

    /// Builds a CSR graph from an edge list: rows sorted, duplicates merged.
    pub fn from_edge_list(el: &EdgeList) -> Result<Self> {
        el.validate()?;
        let n = el.n;
        let mut counts = vec![0usize; n + 1];
        for &(s, _) in &el.edges {
            counts[s as usize + 1] += 1;
        }
        for v in 0..n {
            counts[v + 1] += counts[v];
        }
        let raw_offsets = counts;
        let mut cursor = raw_offsets.clone();
        let mut raw: Vec<(u32, f32)> = vec![(0, 0.0); el.edges.len()];
        for (i, &(s, d)) in el.edges.iter().enumerate() {
            let w = el.weights.as_ref().map_or(1.0, |w| w[i]);
            let slot = &mut cursor[s as usize];
            raw[*slot] = (d, w);
            *slot += 1;
        }

        let weighted = el.weights.is_some();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(raw.len());
        let mut weights = Vec::new();
        offsets.push(0);
        for v in 0..n {
            let row = &mut raw[raw_offsets[v]..raw_offsets[v + 1]];
            row.sort_unstable_by_key(|&(d, _)| d);
            let mut last: Option<u32> = None;
            for &(d, w) in row.iter() {
                if last == Some(d) {
                    if weighted {
                        *weights.last_mut().unwrap() += w;
                    }
                    continue;
                }
                targets.push(d);
                if weighted {
                    weights.push(w);
                }
                last = Some(d);
            }
            offsets.push(targets.len());
        }
        Ok(CsrGraph {
            n,
            offsets,
            targets,
            weights: weighted.then_some(weights),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn weights(&self) -> Option<&[f32]> {
        self.weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn adjacency(&self) -> Adjacency<'_> {
        Adjacency {
            offsets: &self.offsets,
            targets: &self.targets,
            weights: self.weights.as_deref().map(Weights::F32),
            n_dst: self.n,
        }
    }

    /// Iterates `(src, dst)` pairs in row order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(move |v| self.neighbors(v).iter().map(move |&t| (v as u32, t)))
    }

    /// Reverses every edge. Rows of the result come out sorted because
    /// sources are visited in ascending order.
    pub fn transpose(&self) -> CsrGraph {
        let n = self.n;
        let m = self.m();
        let mut offsets = vec![0usize; n + 1];
        for &t in &self.targets {
            offsets[t as usize + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; m];
        let mut weights = self.weights.as_ref().map(|_| vec![0f32; m]);
        for u in 0..n {
            for e in self.offsets[u]..self.offsets[u + 1] {
                let t = self.targets[e] as usize;
                let slot = cursor[t];
                cursor[t] += 1;
                targets[slot] = u as u32;
                if let (Some(dst), Some(src)) = (weights.as_mut(), self.weights.as_ref()) {
                    dst[slot] = src[e];
                }
            }
        }
        CsrGraph {
            n,
            offsets,
            targets,
            weights,
        }
    }

    pub fn out_degrees(&self) -> Degrees {
        Degrees {
            out_deg: (0..self.n).map(|v| self.degree(v) as u32).collect(),
        }
    }

    /// Drops edge weights, keeping the topology.
    pub fn without_weights(mut self) -> Self {
        self.weights = None;
        self
    }
}

/// Builds a CSR graph from an edge list. See [`CsrGraph::from_edge_list`].
pub fn build_csr(el: &EdgeList) -> Result<CsrGraph> {
    CsrGraph::from_edge_list(el)
}

/// Out-degree of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degrees {
    pub out_deg: Vec<u32>,
}

impl Degrees {
    pub fn len(&self) -> usize {
        self.out_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out_deg.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.out_deg.iter().map(|&d| d as u64).sum()
    }

    /// Divisor used by the apply step; dangling vertices divide by one.
    #[inline]
    pub fn divisor(&self, v: usize) -> u32 {
        self.out_deg[v].max(1)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Six vertices, nine edges; used throughout the unit tests.
    pub fn toy() -> CsrGraph {
        let edges = vec![(0, 2), (0, 3), (0, 4), (1, 0), (1, 5), (2, 1), (3, 4), (3, 5), (5, 0)];
        CsrGraph::from_edge_list(&EdgeList::new(6, edges).unwrap()).unwrap()
    }

    pub fn two_cycle() -> CsrGraph {
        CsrGraph::from_edge_list(&EdgeList::new(2, vec![(0, 1), (1, 0)]).unwrap()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_cycle_csr() {
        let g = two_cycle();
        assert_eq!(g.offsets(), &[0, 1, 2]);
        assert_eq!(g.targets(), &[1, 0]);
    }

    #[test]
    fn sorts_and_dedups_rows() {
        let el = EdgeList::new(3, vec![(0, 2), (0, 1), (0, 1)]).unwrap();
        let g = build_csr(&el).unwrap();
        assert_eq!(g.offsets(), &[0, 2, 2, 2]);
        assert_eq!(g.targets(), &[1, 2]);
    }

    #[test]
    fn weighted_duplicates_sum() {
        let el = EdgeList::with_weights(2, vec![(0, 1), (0, 1), (1, 1)], vec![1.5, 2.0, 0.5]).unwrap();
        let g = build_csr(&el).unwrap();
        assert_eq!(g.targets(), &[1, 1]);
        assert_eq!(g.weights().unwrap(), &[3.5, 0.5]);
    }

    #[test]
    fn toy_csr_layout() {
        let g = toy();
        assert_eq!(g.offsets(), &[0, 3, 5, 6, 8, 8, 9]);
        assert_eq!(g.targets(), &[2, 3, 4, 0, 5, 1, 4, 5, 0]);
        assert_eq!(g.out_degrees().out_deg, vec![3, 2, 1, 2, 0, 1]);
    }

    #[test]
    fn toy_in_degrees() {
        let t = toy().transpose();
        assert_eq!(t.out_degrees().out_deg, vec![2, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn transpose_small_cases() {
        let g = two_cycle();
        assert_eq!(g.transpose(), g);
        let single = build_csr(&EdgeList::new(2, vec![(0, 1)]).unwrap()).unwrap();
        let t = single.transpose();
        assert_eq!(t.edges().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn empty_graph_degrees() {
        let g = CsrGraph::empty(3);
        assert_eq!(g.out_degrees().out_deg, vec![0, 0, 0]);
        assert_eq!(g.transpose(), g);
    }

    #[test]
    fn self_loops_are_kept() {
        let g = build_csr(&EdgeList::new(1, vec![(0, 0)]).unwrap()).unwrap();
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn rejects_out_of_range_ids() {
        assert!(matches!(
            EdgeList::new(2, vec![(0, 2)]),
            Err(Error::VertexOutOfRange { id: 2, limit: 2 })
        ));
        assert!(EdgeList::new(MAX_VERTICES + 1, vec![]).is_err());
    }

    #[test]
    fn from_parts_checks_structure() {
        assert!(CsrGraph::from_parts(2, vec![0, 1, 2], vec![1, 0], None).is_ok());
        assert!(CsrGraph::from_parts(2, vec![0, 2, 1], vec![1, 0], None).is_err());
        assert!(CsrGraph::from_parts(2, vec![0, 2, 2], vec![1, 0], None).is_err());
        assert!(CsrGraph::from_parts(2, vec![0, 1, 2], vec![1, 2], None).is_err());
        assert!(CsrGraph::from_parts(0, vec![0], vec![], None).is_ok());
    }

    fn arb_edge_list() -> impl Strategy<Value = EdgeList> {
        (1usize..40).prop_flat_map(|n| {
            proptest::collection::vec((0..n as u32, 0..n as u32), 0..200)
                .prop_map(move |edges| EdgeList::new(n, edges).unwrap())
        })
    }

    proptest! {
        #[test]
        fn transpose_is_involution(el in arb_edge_list()) {
            let g = build_csr(&el).unwrap();
            let t = g.transpose();
            prop_assert_eq!(t.transpose(), g.clone());
            prop_assert_eq!(g.out_degrees().total(), g.m() as u64);
            prop_assert_eq!(t.out_degrees().total(), g.m() as u64);
            // rows sorted and well formed
            prop_assert!(CsrGraph::from_parts(g.n(), g.offsets().to_vec(), g.targets().to_vec(), None).is_ok());
            prop_assert!(CsrGraph::from_parts(t.n(), t.offsets().to_vec(), t.targets().to_vec(), None).is_ok());
            prop_assert!(g.m() <= el.len());
        }
    }
}
