use alloc::vec::Vec;
use core::ops::{Add, AddAssign};

use crate::Engine;

/// Logical width of a vertex id, edge index or offset in the models.
pub const INDEX_BYTES: u64 = 4;

/// Counted movement through one engine phase.
///
/// `updates` is the number of update values written (scatter) or read
/// (gather); for the pull engine it counts source-value reads. `ids` is the
/// number of destination ids read or written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseTraffic {
    pub bytes_read: u64,
    pub bytes_written: u64,
    pub bin_switches: u64,
    pub updates: u64,
    pub ids: u64,
}

impl PhaseTraffic {
    pub fn bytes(&self) -> u64 {
        self.bytes_read + self.bytes_written
    }
}

impl Add for PhaseTraffic {
    type Output = PhaseTraffic;

    fn add(self, o: PhaseTraffic) -> PhaseTraffic {
        PhaseTraffic {
            bytes_read: self.bytes_read + o.bytes_read,
            bytes_written: self.bytes_written + o.bytes_written,
            bin_switches: self.bin_switches + o.bin_switches,
            updates: self.updates + o.updates,
            ids: self.ids + o.ids,
        }
    }
}

impl AddAssign for PhaseTraffic {
    fn add_assign(&mut self, o: PhaseTraffic) {
        *self = *self + o;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    /// One-off destination-id (and weight) writes before the first iteration.
    Init,
    Scatter,
    Gather,
    /// Degree reads of the apply step.
    Apply,
    /// The single pass of the pull engine.
    Pull,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Init => "init",
            Phase::Scatter => "scatter",
            Phase::Gather => "gather",
            Phase::Apply => "apply",
            Phase::Pull => "pull",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrafficRow {
    pub engine: Engine,
    pub phase: Phase,
    pub traffic: PhaseTraffic,
}

/// Per-engine, per-phase totals; rows keep first-seen order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrafficReport {
    rows: Vec<TrafficRow>,
}

impl TrafficReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, engine: Engine, phase: Phase, traffic: PhaseTraffic) {
        match self.rows.iter_mut().find(|r| r.engine == engine && r.phase == phase) {
            Some(row) => row.traffic += traffic,
            None => self.rows.push(TrafficRow { engine, phase, traffic }),
        }
    }

    pub fn rows(&self) -> &[TrafficRow] {
        &self.rows
    }

    pub fn get(&self, engine: Engine, phase: Phase) -> PhaseTraffic {
        self.rows
            .iter()
            .find(|r| r.engine == engine && r.phase == phase)
            .map(|r| r.traffic)
            .unwrap_or_default()
    }

    /// Sum over the given phases of one engine.
    pub fn total(&self, engine: Engine, phases: &[Phase]) -> PhaseTraffic {
        phases
            .iter()
            .map(|&p| self.get(engine, p))
            .fold(PhaseTraffic::default(), |a, b| a + b)
    }

    pub fn merge(&mut self, other: &TrafficReport) {
        for r in &other.rows {
            self.record(r.engine, r.phase, r.traffic);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_accumulates_per_phase() {
        let t = PhaseTraffic {
            bytes_read: 4,
            bytes_written: 8,
            bin_switches: 1,
            updates: 2,
            ids: 3,
        };
        let mut r = TrafficReport::new();
        r.record(Engine::Pcpm, Phase::Scatter, t);
        r.record(Engine::Pcpm, Phase::Scatter, t);
        r.record(Engine::Pcpm, Phase::Gather, t);
        assert_eq!(r.rows().len(), 2);
        assert_eq!(r.get(Engine::Pcpm, Phase::Scatter).bytes(), 24);
        assert_eq!(r.total(Engine::Pcpm, &[Phase::Scatter, Phase::Gather]).updates, 6);
        assert_eq!(r.get(Engine::Bvgas, Phase::Scatter), PhaseTraffic::default());
    }
}
