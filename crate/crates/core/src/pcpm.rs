//! Partition-centric PageRank.
//!
//! Each iteration scatters the scaled rank of every PNG source into the
//! update bins, waits for all partitions, then gathers each destination
//! partition from its bins and applies the damping step in place. Rank
//! vectors hold scaled values (`PR(v) / max(deg(v), 1)`) between iterations.
//!
//! Dangling vertices divide by one and their mass is not redistributed, so
//! ranks do not sum to one on graphs with sinks.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Add;

use crate::analytics::{Phase, PhaseTraffic, TrafficReport, INDEX_BYTES};
use crate::bins::{self, Bins, GatherKind};
use crate::partition::make_layout;
use crate::png::build_png;
use crate::{par, CsrGraph, Engine, Error, PartitionLayout, Png, Result, Value};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_ITERATIONS: usize = 20;

/// `pr[v] = ((1 - d)/n + d * pr[v]) / max(deg[v], 1)` over a slice.
///
/// `pr` and `deg` cover the same vertices; `n` is the vertex count of the
/// whole graph.
pub fn apply<V: Value>(pr: &mut [V], deg: &[u32], d: f64, n: usize) {
    debug_assert_eq!(pr.len(), deg.len());
    if n == 0 {
        return;
    }
    let teleport = V::from_f64((1.0 - d) / n as f64);
    let damping = V::from_f64(d);
    for (x, &deg) in pr.iter_mut().zip(deg) {
        *x = (teleport + damping * *x) / V::from_count(deg.max(1));
    }
}

/// Initial scaled ranks: `(1/n) / max(deg, 1)`.
pub(crate) fn initial_scaled<V: Value>(deg: &[u32]) -> Vec<V> {
    let start = V::from_f64(1.0 / deg.len().max(1) as f64);
    deg.iter().map(|&d| start / V::from_count(d.max(1))).collect()
}

pub(crate) fn unscale<V: Value>(scaled: &[V], deg: &[u32]) -> Vec<V> {
    scaled
        .iter()
        .zip(deg)
        .map(|(&x, &d)| x * V::from_count(d.max(1)))
        .collect()
}

pub(crate) fn check_damping(d: f64) -> Result<()> {
    if d > 0.0 && d < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(alloc::format!("damping must lie in (0, 1), got {d}")))
    }
}

/// A PageRank engine driven one timed step at a time.
pub trait RankEngine<V: Value> {
    fn engine(&self) -> Engine;

    /// Names of the timed steps of one iteration, in execution order.
    fn steps(&self) -> &'static [Phase];

    /// Runs step `index` of the current iteration, recording traffic.
    fn run_step(&mut self, index: usize, report: &mut TrafficReport) -> Result<()>;

    /// Traffic of the one-off work done before the first iteration.
    fn init_traffic(&self) -> PhaseTraffic;

    /// Unscaled ranks after the iterations run so far.
    fn ranks(&self) -> Vec<V>;

    fn iterate(&mut self, report: &mut TrafficReport) -> Result<()> {
        for i in 0..self.steps().len() {
            self.run_step(i, report)?;
        }
        Ok(())
    }

    fn run(&mut self, iterations: usize, report: &mut TrafficReport) -> Result<()> {
        for _ in 0..iterations {
            self.iterate(report)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Default)]
struct GatherApply {
    gather: PhaseTraffic,
    apply: PhaseTraffic,
}

impl Add for GatherApply {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GatherApply {
            gather: self.gather + o.gather,
            apply: self.apply + o.apply,
        }
    }
}

pub struct PcpmEngine<V: Value> {
    n: usize,
    m: usize,
    damping: f64,
    gather_kind: GatherKind,
    layout: PartitionLayout,
    png: Png,
    bins: Bins<V>,
    deg: Vec<u32>,
    pr: Vec<V>,
    next: Vec<V>,
    init: PhaseTraffic,
}

impl<V: Value> PcpmEngine<V> {
    /// Builds the layout, PNG and destination-id bins for `g` with partition
    /// width `q`.
    pub fn new(g: &CsrGraph, q: usize, damping: f64) -> Result<Self> {
        check_damping(damping)?;
        let layout = make_layout(g, q)?;
        let png = build_png(g.adjacency(), &layout);
        let mut bins = Bins::new(&layout, false);
        let init = bins::write_dest_ids(g.adjacency(), &png, &mut bins)?;
        let deg = g.out_degrees().out_deg;
        Ok(PcpmEngine {
            n: g.n(),
            m: g.m(),
            damping,
            gather_kind: GatherKind::default(),
            layout,
            png,
            bins,
            pr: initial_scaled(&deg),
            next: vec![V::ZERO; g.n()],
            deg,
            init,
        })
    }

    pub fn with_gather(mut self, kind: GatherKind) -> Self {
        self.gather_kind = kind;
        self
    }

    pub fn layout(&self) -> &PartitionLayout {
        &self.layout
    }

    pub fn png(&self) -> &Png {
        &self.png
    }

    pub fn bins(&self) -> &Bins<V> {
        &self.bins
    }

    pub fn e_prime(&self) -> usize {
        self.png.e_prime()
    }

    pub fn compression_ratio(&self) -> Result<f64> {
        self.png.compression_ratio(self.m)
    }

    /// Scaled ranks as propagated on edges.
    pub fn scaled(&self) -> &[V] {
        &self.pr
    }

    /// Scatter phase: fills the update bins from the current scaled ranks.
    pub fn scatter(&mut self) -> PhaseTraffic {
        bins::scatter(&self.png, &self.pr, &mut self.bins)
    }

    /// Gather and apply, one destination partition per task, then swaps the
    /// rank buffers. Returns `(gather, apply)` traffic.
    pub fn gather_apply(&mut self) -> Result<(PhaseTraffic, PhaseTraffic)> {
        let q = self.layout.q_dst().max(1);
        let (n, d, kind) = (self.n, self.damping, self.gather_kind);
        let bins = &self.bins;
        let work: Vec<(&mut [V], &[u32])> = self.next.chunks_mut(q).zip(self.deg.chunks(q)).collect();
        let t = par::try_map_reduce(work, |j, (out, deg)| {
            out.fill(V::ZERO);
            let gather = bins::gather_partition(bins, j, out, kind)?;
            apply(out, deg, d, n);
            Ok(GatherApply {
                gather,
                apply: PhaseTraffic {
                    bytes_read: deg.len() as u64 * INDEX_BYTES,
                    ..PhaseTraffic::default()
                },
            })
        })?;
        core::mem::swap(&mut self.pr, &mut self.next);
        Ok((t.gather, t.apply))
    }
}

impl<V: Value> RankEngine<V> for PcpmEngine<V> {
    fn engine(&self) -> Engine {
        Engine::Pcpm
    }

    fn steps(&self) -> &'static [Phase] {
        &[Phase::Scatter, Phase::Gather]
    }

    fn run_step(&mut self, index: usize, report: &mut TrafficReport) -> Result<()> {
        match index {
            0 => {
                let t = self.scatter();
                report.record(Engine::Pcpm, Phase::Scatter, t);
            }
            1 => {
                let (g, a) = self.gather_apply()?;
                report.record(Engine::Pcpm, Phase::Gather, g);
                report.record(Engine::Pcpm, Phase::Apply, a);
            }
            _ => return Err(Error::Parameter(alloc::format!("no step {index}"))),
        }
        Ok(())
    }

    fn init_traffic(&self) -> PhaseTraffic {
        self.init
    }

    fn ranks(&self) -> Vec<V> {
        unscale(&self.pr, &self.deg)
    }
}

/// Runs `iterations` partition-centric PageRank iterations with partition
/// width `q` and returns unscaled ranks.
pub fn pcpm_pagerank<V: Value>(g: &CsrGraph, q: usize, iterations: usize, damping: f64) -> Result<Vec<V>> {
    if iterations == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }
    let mut engine = PcpmEngine::<V>::new(g, q, damping)?;
    engine.run(iterations, &mut TrafficReport::new())?;
    Ok(engine.ranks())
}
