//! Binning vertex-centric gather-apply-scatter.
//!
//! Scatter walks the graph vertex by vertex and appends `(value, dest)`
//! messages to the bin of each destination. Every worker owns a private,
//! precomputed range in every bin. Messages pass through a cache-line-sized
//! staging buffer per bin that is flushed when full, standing in for
//! streaming stores. Destination ids are written once before the first
//! iteration; only values are rewritten afterwards.

use alloc::vec;
use alloc::vec::Vec;

use crate::analytics::{Phase, PhaseTraffic, TrafficReport, INDEX_BYTES};
use crate::pcpm::{check_damping, RankEngine};
use crate::{par, CsrGraph, Engine, Error, Result, Value};

/// Staging buffer size per (worker, bin).
pub const STAGING_BYTES: usize = 128;

#[derive(Clone, Debug)]
pub struct BvgasBins<V> {
    q: usize,
    shift: Option<u32>,
    k: usize,
    ranges: Vec<(usize, usize)>,
    bin_start: Vec<usize>,
    // [worker * k + bin]
    offsets: Vec<usize>,
    updates: Vec<V>,
    dest_ids: Vec<u32>,
    ids_written: bool,
}

impl<V: Value> BvgasBins<V> {
    /// Sizes bins of width `q` for `g`, with `workers` static vertex ranges
    /// balanced by edge count.
    pub fn new(g: &CsrGraph, q: usize, workers: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::Parameter("bin width must be at least 1".into()));
        }
        let k = g.n().div_ceil(q);
        let shift = q.is_power_of_two().then(|| q.trailing_zeros());
        let ranges = par::edge_balanced_ranges(g.offsets(), workers);
        let t = ranges.len();
        let mut counts = vec![0usize; t * k];
        for (w, &(lo, hi)) in ranges.iter().enumerate() {
            for &u in &g.targets()[g.offsets()[lo]..g.offsets()[hi]] {
                counts[w * k + bin_of(u, q, shift)] += 1;
            }
        }
        let mut offsets = vec![0usize; t * k];
        let mut sizes = vec![0usize; k];
        for w in 0..t {
            for j in 0..k {
                offsets[w * k + j] = sizes[j];
                sizes[j] += counts[w * k + j];
            }
        }
        let mut bin_start = vec![0usize; k + 1];
        for j in 0..k {
            bin_start[j + 1] = bin_start[j] + sizes[j];
        }
        Ok(BvgasBins {
            q,
            shift,
            k,
            ranges,
            bin_start,
            offsets,
            updates: vec![V::ZERO; g.m()],
            dest_ids: vec![0; g.m()],
            ids_written: false,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.k
    }

    pub fn messages(&self, j: usize) -> impl Iterator<Item = (V, u32)> + '_ {
        let r = self.bin_start[j]..self.bin_start[j + 1];
        self.updates[r.clone()]
            .iter()
            .copied()
            .zip(self.dest_ids[r].iter().copied())
    }

    pub fn bin_len(&self, j: usize) -> usize {
        self.bin_start[j + 1] - self.bin_start[j]
    }
}

#[inline]
fn bin_of(u: u32, q: usize, shift: Option<u32>) -> usize {
    match shift {
        Some(s) => (u >> s) as usize,
        None => u as usize / q,
    }
}

/// Per-(worker, bin) staging buffers that flush whole lines into bin regions.
struct Stager<'a, T: Copy> {
    cap: usize,
    buf: Vec<T>,
    fill: Vec<usize>,
    cursor: Vec<usize>,
    regions: Vec<&'a mut [T]>,
    flushes: u64,
    flushed: u64,
}

impl<'a, T: Copy + Default> Stager<'a, T> {
    fn new(regions: Vec<&'a mut [T]>, elem_bytes: usize) -> Self {
        let k = regions.len();
        let cap = (STAGING_BYTES / elem_bytes).max(1);
        Stager {
            cap,
            buf: vec![T::default(); k * cap],
            fill: vec![0; k],
            cursor: vec![0; k],
            regions,
            flushes: 0,
            flushed: 0,
        }
    }

    #[inline]
    fn push(&mut self, j: usize, x: T) -> Result<()> {
        self.buf[j * self.cap + self.fill[j]] = x;
        self.fill[j] += 1;
        if self.fill[j] == self.cap {
            self.flush(j)?;
        }
        Ok(())
    }

    fn flush(&mut self, j: usize) -> Result<()> {
        let len = self.fill[j];
        if len == 0 {
            return Ok(());
        }
        let at = self.cursor[j];
        let region = &mut self.regions[j];
        if at + len > region.len() {
            return Err(Error::CapacityOverflow {
                bin: j,
                expected: region.len(),
                found: at + len,
            });
        }
        region[at..at + len].copy_from_slice(&self.buf[j * self.cap..j * self.cap + len]);
        self.cursor[j] += len;
        self.fill[j] = 0;
        self.flushes += 1;
        self.flushed += len as u64;
        Ok(())
    }

    fn finish(mut self) -> Result<(u64, u64)> {
        for j in 0..self.regions.len() {
            self.flush(j)?;
            if self.cursor[j] != self.regions[j].len() {
                return Err(Error::CapacityOverflow {
                    bin: j,
                    expected: self.regions[j].len(),
                    found: self.cursor[j],
                });
            }
        }
        Ok((self.flushes, self.flushed))
    }
}

fn write_dest_ids<V: Value>(g: &CsrGraph, bins: &mut BvgasBins<V>) -> Result<PhaseTraffic> {
    let (q, shift, k) = (bins.q, bins.shift, bins.k);
    let t = bins.ranges.len();
    let regions = par::split_regions(&mut bins.dest_ids, &bins.bin_start, &bins.offsets, t, k);
    let ranges = &bins.ranges;
    let traffic = par::try_map_reduce(regions, |w, regions| {
        let (lo, hi) = ranges[w];
        let mut stage = Stager::new(regions, INDEX_BYTES as usize);
        for v in lo..hi {
            for &u in g.neighbors(v) {
                stage.push(bin_of(u, q, shift), u)?;
            }
        }
        let (flushes, flushed) = stage.finish()?;
        let edges = (g.offsets()[hi] - g.offsets()[lo]) as u64;
        Ok(PhaseTraffic {
            bytes_read: ((hi - lo) as u64 + edges) * INDEX_BYTES,
            bytes_written: flushed * INDEX_BYTES,
            bin_switches: flushes,
            updates: 0,
            ids: flushed,
        })
    })?;
    bins.ids_written = true;
    Ok(traffic)
}

/// Appends `pr[v] / max(deg(v), 1)` on every out-edge of every vertex.
///
/// `pr` holds unscaled ranks. Destination ids are written on the first call
/// and reused afterwards.
pub fn bvgas_scatter<V: Value>(g: &CsrGraph, pr: &[V], bins: &mut BvgasBins<V>) -> Result<PhaseTraffic> {
    if pr.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: pr.len(),
        });
    }
    if !bins.ids_written {
        write_dest_ids(g, bins)?;
    }
    let (q, shift, k) = (bins.q, bins.shift, bins.k);
    let t = bins.ranges.len();
    let regions = par::split_regions(&mut bins.updates, &bins.bin_start, &bins.offsets, t, k);
    let ranges = &bins.ranges;
    par::try_map_reduce(regions, |w, regions| {
        let (lo, hi) = ranges[w];
        let mut stage = Stager::new(regions, V::BYTES);
        for (v, &rank) in (lo..hi).zip(&pr[lo..hi]) {
            let row = g.neighbors(v);
            let x = rank / V::from_count((row.len() as u32).max(1));
            for &u in row {
                stage.push(bin_of(u, q, shift), x)?;
            }
        }
        let (flushes, flushed) = stage.finish()?;
        let len = (hi - lo) as u64;
        Ok(PhaseTraffic {
            bytes_read: (len + flushed) * INDEX_BYTES + len * V::BYTES as u64,
            bytes_written: flushed * V::BYTES as u64,
            bin_switches: flushes,
            updates: flushed,
            ids: 0,
        })
    })
}

/// Zeroes `pr_out`, accumulates every bin and applies
/// `pr = (1 - d)/n + d * pr`, leaving unscaled ranks.
pub fn bvgas_gather<V: Value>(bins: &BvgasBins<V>, pr_out: &mut [V], damping: f64) -> Result<PhaseTraffic> {
    let n = pr_out.len();
    if n.div_ceil(bins.q) != bins.k {
        return Err(Error::DimensionMismatch {
            expected: bins.k * bins.q,
            found: n,
        });
    }
    let teleport = V::from_f64((1.0 - damping) / n.max(1) as f64);
    let d = V::from_f64(damping);
    let chunks: Vec<&mut [V]> = pr_out.chunks_mut(bins.q).collect();
    Ok(par::map_reduce(chunks, |j, out| {
        out.fill(V::ZERO);
        let base = j * bins.q;
        for (update, dest) in bins.messages(j) {
            out[dest as usize - base] += update;
        }
        for x in out.iter_mut() {
            *x = teleport + d * *x;
        }
        let msgs = bins.bin_len(j) as u64;
        PhaseTraffic {
            bytes_read: msgs * (INDEX_BYTES + V::BYTES as u64),
            bytes_written: (out.len() * V::BYTES) as u64,
            bin_switches: 0,
            updates: msgs,
            ids: msgs,
        }
    }))
}

pub struct BvgasEngine<V: Value> {
    g: CsrGraph,
    damping: f64,
    bins: BvgasBins<V>,
    pr: Vec<V>,
    init: PhaseTraffic,
}

impl<V: Value> BvgasEngine<V> {
    /// Bin width `q`; the static scatter split uses the current worker count.
    pub fn new(g: &CsrGraph, q: usize, damping: f64) -> Result<Self> {
        Self::with_workers(g, q, damping, par::current_workers())
    }

    pub fn with_workers(g: &CsrGraph, q: usize, damping: f64, workers: usize) -> Result<Self> {
        check_damping(damping)?;
        let g = g.clone().without_weights();
        let mut bins = BvgasBins::new(&g, q, workers)?;
        let init = write_dest_ids(&g, &mut bins)?;
        let n = g.n();
        Ok(BvgasEngine {
            pr: vec![V::from_f64(1.0 / n.max(1) as f64); n],
            g,
            damping,
            bins,
            init,
        })
    }

    pub fn bins(&self) -> &BvgasBins<V> {
        &self.bins
    }

    pub fn scatter(&mut self) -> Result<PhaseTraffic> {
        bvgas_scatter(&self.g, &self.pr, &mut self.bins)
    }

    pub fn gather(&mut self) -> Result<PhaseTraffic> {
        bvgas_gather(&self.bins, &mut self.pr, self.damping)
    }
}

impl<V: Value> RankEngine<V> for BvgasEngine<V> {
    fn engine(&self) -> Engine {
        Engine::Bvgas
    }

    fn steps(&self) -> &'static [Phase] {
        &[Phase::Scatter, Phase::Gather]
    }

    fn run_step(&mut self, index: usize, report: &mut TrafficReport) -> Result<()> {
        let (phase, t) = match index {
            0 => (Phase::Scatter, self.scatter()?),
            1 => (Phase::Gather, self.gather()?),
            _ => return Err(Error::Parameter(alloc::format!("no step {index}"))),
        };
        report.record(Engine::Bvgas, phase, t);
        Ok(())
    }

    fn init_traffic(&self) -> PhaseTraffic {
        self.init
    }

    fn ranks(&self) -> Vec<V> {
        self.pr.clone()
    }
}

/// Runs `iterations` binning iterations with bin width `q` and returns
/// unscaled ranks.
pub fn bvgas_pagerank<V: Value>(g: &CsrGraph, q: usize, iterations: usize, damping: f64) -> Result<Vec<V>> {
    if iterations == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }
    let mut e = BvgasEngine::<V>::new(g, q, damping)?;
    e.run(iterations, &mut TrafficReport::new())?;
    Ok(e.ranks())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{toy, two_cycle};
    use crate::graph::{build_csr, EdgeList};

    #[test]
    fn toy_bin_zero_gets_three_messages() {
        let g = toy();
        let mut e = BvgasEngine::<f64>::with_workers(&g, 2, 0.85, 3).unwrap();
        let t = e.scatter().unwrap();
        assert_eq!(e.bins().bin_len(0), 3);
        let dests: Vec<u32> = e.bins().messages(0).map(|(_, d)| d).collect();
        assert_eq!(dests, vec![0, 1, 0]);
        assert_eq!(t.updates, 9);
    }

    #[test]
    fn value_repeated_per_out_edge() {
        let g = build_csr(&EdgeList::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap()).unwrap();
        let mut e = BvgasEngine::<f64>::with_workers(&g, 2, 0.85, 1).unwrap();
        e.scatter().unwrap();
        let x = 0.25 / 3.0;
        let all: Vec<f64> = (0..2)
            .flat_map(|j| e.bins().messages(j).map(|(v, _)| v).collect::<Vec<_>>())
            .collect();
        assert_eq!(all, vec![x; 3]);
    }

    #[test]
    fn edgeless_graph_sends_nothing() {
        let g = CsrGraph::empty(4);
        let mut e = BvgasEngine::<f32>::with_workers(&g, 2, 0.85, 2).unwrap();
        let t = e.scatter().unwrap();
        assert_eq!(t.updates, 0);
        assert_eq!(t.bytes_written, 0);
    }

    #[test]
    fn two_cycle_exact() {
        let g = two_cycle();
        let a: Vec<f64> = bvgas_pagerank(&g, 1, 20, 0.85).unwrap();
        let b: Vec<f64> = crate::baselines::pdpr_pagerank(&g.transpose(), &g.out_degrees(), 20, 0.85).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn staging_flushes_whole_lines() {
        // 100 edges into a single bin: 25 values per 128-byte line in f32... 32 per line
        let edges = (0..100u32).map(|v| (0, v)).collect();
        let g = build_csr(&EdgeList::new(100, edges).unwrap()).unwrap();
        let mut e = BvgasEngine::<f32>::with_workers(&g, 128, 0.85, 1).unwrap();
        let t = e.scatter().unwrap();
        assert_eq!(t.bin_switches, 4); // 32 + 32 + 32 + 4
        assert_eq!(t.bytes_written, 400);
    }

    #[test]
    fn non_power_of_two_width() {
        let g = toy();
        let a: Vec<f64> = bvgas_pagerank(&g, 3, 20, 0.85).unwrap();
        let b: Vec<f64> = bvgas_pagerank(&g, 4, 20, 0.85).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
