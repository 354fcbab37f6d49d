//! Pull-direction PageRank over the transposed graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::analytics::{Phase, PhaseTraffic, TrafficReport, INDEX_BYTES};
use crate::pcpm::{check_damping, initial_scaled, unscale, RankEngine};
use crate::{par, CsrGraph, Degrees, Engine, Error, Result, Value};

pub struct PdprEngine<V: Value> {
    g_in: CsrGraph,
    deg: Vec<u32>,
    damping: f64,
    ranges: Vec<(usize, usize)>,
    pr: Vec<V>,
    next: Vec<V>,
}

impl<V: Value> PdprEngine<V> {
    /// `g_in` must be the transpose of the graph whose out-degrees are `deg`.
    pub fn new(g_in: CsrGraph, deg: Degrees, damping: f64) -> Result<Self> {
        check_damping(damping)?;
        if deg.len() != g_in.n() {
            return Err(Error::DimensionMismatch {
                expected: g_in.n(),
                found: deg.len(),
            });
        }
        // static split with roughly equal in-edges per worker
        let ranges = par::edge_balanced_ranges(g_in.offsets(), par::current_workers() * 4);
        let n = g_in.n();
        Ok(PdprEngine {
            pr: initial_scaled(&deg.out_deg),
            next: vec![V::ZERO; n],
            deg: deg.out_deg,
            g_in,
            damping,
            ranges,
        })
    }

    /// Transposes `g` and builds the engine.
    pub fn from_graph(g: &CsrGraph, damping: f64) -> Result<Self> {
        Self::new(g.transpose(), g.out_degrees(), damping)
    }

    /// One pull iteration; returns `(pull, apply)` traffic.
    pub fn pull(&mut self) -> (PhaseTraffic, PhaseTraffic) {
        let n = self.g_in.n();
        let teleport = V::from_f64((1.0 - self.damping) / n.max(1) as f64);
        let damping = V::from_f64(self.damping);
        let mut rest: &mut [V] = &mut self.next;
        let mut work = Vec::with_capacity(self.ranges.len());
        for &(lo, hi) in &self.ranges {
            let (head, tail) = core::mem::take(&mut rest).split_at_mut(hi - lo);
            work.push((lo, head));
            rest = tail;
        }
        let (g_in, pr, deg) = (&self.g_in, &self.pr, &self.deg);
        let pulled = par::map_reduce(work, |_, (lo, out)| {
            let mut edges = 0u64;
            for (i, slot) in out.iter_mut().enumerate() {
                let v = lo + i;
                let mut temp = V::ZERO;
                for &u in g_in.neighbors(v) {
                    temp += pr[u as usize];
                }
                edges += g_in.degree(v) as u64;
                *slot = (teleport + damping * temp) / V::from_count(deg[v].max(1));
            }
            let len = out.len() as u64;
            PhaseTraffic {
                bytes_read: (len + edges) * INDEX_BYTES,
                bytes_written: len * V::BYTES as u64,
                bin_switches: 0,
                updates: edges,
                ids: 0,
            }
        });
        core::mem::swap(&mut self.pr, &mut self.next);
        let apply = PhaseTraffic {
            bytes_read: n as u64 * INDEX_BYTES,
            ..PhaseTraffic::default()
        };
        (pulled, apply)
    }
}

impl<V: Value> RankEngine<V> for PdprEngine<V> {
    fn engine(&self) -> Engine {
        Engine::Pdpr
    }

    fn steps(&self) -> &'static [Phase] {
        &[Phase::Pull]
    }

    fn run_step(&mut self, index: usize, report: &mut TrafficReport) -> Result<()> {
        if index != 0 {
            return Err(Error::Parameter(alloc::format!("no step {index}")));
        }
        let (pull, apply) = self.pull();
        report.record(Engine::Pdpr, Phase::Pull, pull);
        report.record(Engine::Pdpr, Phase::Apply, apply);
        Ok(())
    }

    fn init_traffic(&self) -> PhaseTraffic {
        PhaseTraffic::default()
    }

    fn ranks(&self) -> Vec<V> {
        unscale(&self.pr, &self.deg)
    }
}

/// Pull-direction PageRank: `g_in` is the transposed graph, `deg` the
/// out-degrees of the original. Returns unscaled ranks.
pub fn pdpr_pagerank<V: Value>(g_in: &CsrGraph, deg: &Degrees, iterations: usize, damping: f64) -> Result<Vec<V>> {
    if iterations == 0 {
        return Err(Error::Parameter("at least one iteration is required".into()));
    }
    let mut e = PdprEngine::<V>::new(g_in.clone(), deg.clone(), damping)?;
    e.run(iterations, &mut TrafficReport::new())?;
    Ok(e.ranks())
}
