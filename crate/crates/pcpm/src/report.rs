//! CSV output. Every writer emits a fixed header row, even with no data.

use std::io::Write;

use anyhow::Result;
use pcpm_core::analytics::{Phase, PhaseTraffic, TrafficReport};

use crate::runner::{RunReport, SweepRow};

pub const TRAFFIC_HEADER: [&str; 7] = [
    "engine",
    "phase",
    "bytes_read",
    "bytes_written",
    "bin_switches",
    "updates",
    "ids",
];

pub const RUN_HEADER: [&str; 9] = [
    "engine",
    "phase",
    "seconds",
    "bytes_read",
    "bytes_written",
    "bin_switches",
    "updates",
    "ids",
    "iterations",
];

pub const SWEEP_HEADER: [&str; 8] = [
    "engine",
    "q",
    "e_prime",
    "r",
    "bytes_per_iteration",
    "scatter_s",
    "gather_s",
    "total_s",
];

pub const MODEL_HEADER: [&str; 4] = ["metric", "engine", "r", "value"];

fn traffic_fields(t: &PhaseTraffic) -> [String; 5] {
    [
        t.bytes_read.to_string(),
        t.bytes_written.to_string(),
        t.bin_switches.to_string(),
        t.updates.to_string(),
        t.ids.to_string(),
    ]
}

pub fn write_traffic_csv<W: Write>(report: &TrafficReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRAFFIC_HEADER)?;
    for row in report.rows() {
        let mut rec = vec![row.engine.name().to_string(), row.phase.name().to_string()];
        rec.extend(traffic_fields(&row.traffic));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// One row per phase: mean wall time and, when `with_traffic`, the counted
/// traffic summed over all iterations. `init` carries the preprocessing
/// time; `apply` has no time of its own because it runs inside gather.
pub fn write_run_csv<W: Write>(report: &RunReport, with_traffic: bool, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RUN_HEADER)?;
    let mut phases: Vec<Phase> = vec![Phase::Init];
    phases.extend(report.phase_secs.iter().map(|p| p.0));
    for row in report.traffic.rows() {
        if !phases.contains(&row.phase) {
            phases.push(row.phase);
        }
    }
    for phase in phases {
        let secs = if phase == Phase::Init {
            Some(report.preprocess_secs)
        } else {
            report.phase_secs.iter().find(|p| p.0 == phase).map(|p| p.1)
        };
        let mut rec = vec![
            report.engine.name().to_string(),
            phase.name().to_string(),
            secs.map(|s| s.to_string()).unwrap_or_default(),
        ];
        if with_traffic {
            rec.extend(traffic_fields(&report.traffic.get(report.engine, phase)));
        } else {
            rec.extend(std::iter::repeat_n(String::new(), 5));
        }
        rec.push(report.iterations.to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_HEADER)?;
    for r in rows {
        out.write_record([
            r.engine.name().to_string(),
            r.q.to_string(),
            r.e_prime.to_string(),
            r.r.to_string(),
            r.bytes_per_iteration.to_string(),
            r.scatter_secs.to_string(),
            r.gather_secs.to_string(),
            r.total_secs.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// A single model output. `engine` is empty for engine-independent rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelLine {
    pub metric: &'static str,
    pub engine: &'static str,
    pub r: f64,
    pub value: f64,
}

pub fn write_model_csv<W: Write>(lines: &[ModelLine], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(MODEL_HEADER)?;
    for l in lines {
        out.write_record([
            l.metric.to_string(),
            l.engine.to_string(),
            l.r.to_string(),
            l.value.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcpm_core::Engine;

    #[test]
    fn traffic_schema() {
        let mut r = TrafficReport::new();
        r.record(
            Engine::Pcpm,
            Phase::Scatter,
            PhaseTraffic {
                bytes_read: 1,
                bytes_written: 2,
                bin_switches: 3,
                updates: 4,
                ids: 5,
            },
        );
        let mut buf = Vec::new();
        write_traffic_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "engine,phase,bytes_read,bytes_written,bin_switches,updates,ids\npcpm,scatter,1,2,3,4,5\n"
        );
    }

    #[test]
    fn empty_tables_keep_headers() {
        let mut buf = Vec::new();
        write_sweep_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), SWEEP_HEADER.join(",") + "\n");
        let mut buf = Vec::new();
        write_model_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "metric,engine,r,value\n");
    }
}
