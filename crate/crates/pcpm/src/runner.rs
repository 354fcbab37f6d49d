//! Benchmark commands behind the CLI.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use pcpm_core::analytics::{
    breakeven_cmr, predict_bvgas_comm, predict_pcpm_comm, predict_pdpr_comm, predict_random_accesses,
    sweep_model_curve, ModelParams, Phase, PhaseTraffic, TrafficReport,
};
use pcpm_core::baselines::{BvgasEngine, PdprEngine};
use pcpm_core::bins::{self, GatherKind};
use pcpm_core::pcpm::{RankEngine, DEFAULT_DAMPING, DEFAULT_ITERATIONS};
use pcpm_core::png::validate_png;
use pcpm_core::rmat::{generate_rmat, RmatProbs};
use pcpm_core::{CsrGraph, Engine, PcpmEngine, Value, DEFAULT_PARTITION_WIDTH};

use crate::report::ModelLine;
use crate::{binfmt, edgelist, mtx};

pub const DEFAULT_REPEATS: usize = 5;
pub const DEFAULT_WORKERS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueWidth {
    Four,
    Eight,
}

impl ValueWidth {
    pub fn from_bytes(b: u8) -> Result<Self> {
        match b {
            4 => Ok(ValueWidth::Four),
            8 => Ok(ValueWidth::Eight),
            _ => bail!("value width must be 4 or 8 bytes, got {b}"),
        }
    }

    pub fn bytes(self) -> usize {
        match self {
            ValueWidth::Four => 4,
            ValueWidth::Eight => 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub engine: Engine,
    /// Partition width (PCPM) or bin width (BVGAS) in vertices.
    pub q: usize,
    pub iterations: usize,
    pub damping: f64,
    pub workers: usize,
    pub repeats: usize,
    pub value_width: ValueWidth,
    pub count_traffic: bool,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, engine: Engine) -> Self {
        RunConfig {
            input: input.into(),
            engine,
            q: DEFAULT_PARTITION_WIDTH,
            iterations: DEFAULT_ITERATIONS,
            damping: DEFAULT_DAMPING,
            workers: default_workers(),
            repeats: DEFAULT_REPEATS,
            value_width: ValueWidth::Four,
            count_traffic: false,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.q >= 1, "partition width must be at least 1");
        ensure!(
            self.damping > 0.0 && self.damping < 1.0,
            "damping must lie in (0, 1), got {}",
            self.damping
        );
        ensure!(self.repeats >= 1, "repeats must be at least 1");
        ensure!(self.iterations >= 1, "iterations must be at least 1");
        ensure!(self.workers >= 1, "workers must be at least 1");
        Ok(())
    }
}

/// Sixteen workers, or fewer if the machine has fewer hardware threads.
pub fn default_workers() -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    DEFAULT_WORKERS.min(hw)
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("building worker pool")?;
    Ok(pool.install(f))
}

/// Reads a graph, choosing the format by extension: `.pcsr` binary CSR,
/// `.mtx` Matrix Market, anything else a text edge list.
pub fn load_graph(path: &Path) -> Result<CsrGraph> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let g = match ext {
        "pcsr" => binfmt::read_binary_csr(path)?,
        "mtx" => {
            let f = fs::File::open(path)?;
            mtx::matrix_to_graph(&mtx::read_matrix_market(BufReader::new(f))?)?
        }
        _ => {
            let f = fs::File::open(path)?;
            CsrGraph::from_edge_list(&edgelist::read_edge_list(BufReader::new(f))?)?
        }
    };
    Ok(g)
}

/// Writes `.pcsr` as binary CSR and anything else as a text edge list.
pub fn save_graph(g: &CsrGraph, path: &Path) -> Result<()> {
    if path.extension().and_then(|e| e.to_str()) == Some("pcsr") {
        binfmt::write_binary_csr(g, path)?;
    } else {
        let f = fs::File::create(path)?;
        edgelist::write_edge_list(g, std::io::BufWriter::new(f))?;
    }
    Ok(())
}

pub fn cmd_convert(input: &Path, output: &Path) -> Result<CsrGraph> {
    let g = load_graph(input).with_context(|| format!("reading {}", input.display()))?;
    save_graph(&g, output).with_context(|| format!("writing {}", output.display()))?;
    Ok(g)
}

#[derive(Clone, Copy, Debug)]
pub struct GenerateArgs {
    pub scale: u32,
    pub edge_factor: usize,
    pub seed: u64,
    pub probs: RmatProbs,
}

pub fn cmd_generate(args: &GenerateArgs, output: &Path) -> Result<CsrGraph> {
    let el = generate_rmat(args.scale, args.edge_factor, args.seed, args.probs)?;
    let g = CsrGraph::from_edge_list(&el)?;
    save_graph(&g, output).with_context(|| format!("writing {}", output.display()))?;
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub engine: Engine,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub iterations: usize,
    pub repeats: usize,
    pub value_bytes: usize,
    /// Mean seconds spent building the engine (transpose, layout, PNG, bins).
    pub preprocess_secs: f64,
    /// Mean seconds per timed step, summed over all iterations.
    pub phase_secs: Vec<(Phase, f64)>,
    /// Counted traffic of one repeat: the `Init` row plus every iteration.
    pub traffic: TrafficReport,
    /// Sum of the final ranks.
    pub checksum: f64,
    pub ranks: Vec<f64>,
    pub e_prime: Option<usize>,
    pub r: Option<f64>,
}

impl RunReport {
    pub fn total_secs(&self) -> f64 {
        self.phase_secs.iter().map(|p| p.1).sum()
    }

    pub fn phase_time(&self, phase: Phase) -> f64 {
        self.phase_secs.iter().filter(|p| p.0 == phase).map(|p| p.1).sum()
    }

    /// Counted bytes per iteration, excluding the one-off init work.
    pub fn bytes_per_iteration(&self) -> f64 {
        let total: u64 = self
            .traffic
            .rows()
            .iter()
            .filter(|r| r.phase != Phase::Init)
            .map(|r| r.traffic.bytes())
            .sum();
        total as f64 / self.iterations as f64
    }
}

struct Built<V: Value> {
    engine: Box<dyn RankEngine<V>>,
    e_prime: Option<usize>,
    r: Option<f64>,
}

fn build<V: Value>(g: &CsrGraph, cfg: &RunConfig) -> Result<Built<V>> {
    Ok(match cfg.engine {
        Engine::Pdpr => Built {
            engine: Box::new(PdprEngine::<V>::from_graph(g, cfg.damping)?),
            e_prime: None,
            r: None,
        },
        Engine::Bvgas => Built {
            engine: Box::new(BvgasEngine::<V>::new(g, cfg.q, cfg.damping)?),
            e_prime: None,
            r: None,
        },
        Engine::Pcpm => {
            let e = PcpmEngine::<V>::new(g, cfg.q, cfg.damping)?;
            let e_prime = e.e_prime();
            let r = e.compression_ratio().ok();
            Built {
                engine: Box::new(e),
                e_prime: Some(e_prime),
                r,
            }
        }
    })
}

fn run_typed<V: Value>(g: &CsrGraph, cfg: &RunConfig) -> Result<RunReport> {
    let mut preprocess = 0.0;
    let mut times: Vec<f64> = Vec::new();
    let mut steps: &[Phase] = &[];
    let mut last = None;
    for _ in 0..cfg.repeats {
        let t0 = Instant::now();
        let mut built = build::<V>(g, cfg)?;
        preprocess += t0.elapsed().as_secs_f64();
        steps = built.engine.steps();
        times.resize(steps.len(), 0.0);
        let mut report = TrafficReport::new();
        report.record(cfg.engine, Phase::Init, built.engine.init_traffic());
        for _ in 0..cfg.iterations {
            for (i, t) in times.iter_mut().enumerate() {
                let t0 = Instant::now();
                built.engine.run_step(i, &mut report)?;
                *t += t0.elapsed().as_secs_f64();
            }
        }
        last = Some((built, report));
    }
    let (built, traffic) = last.expect("at least one repeat");
    let ranks: Vec<f64> = built.engine.ranks().into_iter().map(V::to_f64).collect();
    let reps = cfg.repeats as f64;
    Ok(RunReport {
        engine: cfg.engine,
        n: g.n(),
        m: g.m(),
        q: cfg.q,
        iterations: cfg.iterations,
        repeats: cfg.repeats,
        value_bytes: V::BYTES,
        preprocess_secs: preprocess / reps,
        phase_secs: steps.iter().zip(&times).map(|(&p, &t)| (p, t / reps)).collect(),
        traffic,
        checksum: ranks.iter().sum(),
        ranks,
        e_prime: built.e_prime,
        r: built.r,
    })
}

/// Runs the configured engine on an already loaded graph on the current
/// thread pool.
pub fn run_graph(g: &CsrGraph, cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    match cfg.value_width {
        ValueWidth::Four => run_typed::<f32>(g, cfg),
        ValueWidth::Eight => run_typed::<f64>(g, cfg),
    }
}

/// Loads `cfg.input`, runs on a pool of `cfg.workers` threads and writes the
/// run CSV to `cfg.out` if set.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let g = load_graph(&cfg.input).with_context(|| format!("reading {}", cfg.input.display()))?;
    let report = with_pool(cfg.workers, || run_graph(&g, cfg))??;
    if let Some(out) = &cfg.out {
        let f = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
        crate::report::write_run_csv(&report, cfg.count_traffic, f)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub engine: Engine,
    pub q: usize,
    /// PNG edges at this width (reported for every engine).
    pub e_prime: usize,
    /// `m / e_prime`, or 0 for an edgeless graph.
    pub r: f64,
    pub bytes_per_iteration: f64,
    pub scatter_secs: f64,
    pub gather_secs: f64,
    pub total_secs: f64,
}

/// Runs every engine in `engines` at every width in `qs`. `base` supplies
/// iterations, damping, repeats and value width.
pub fn sweep_graph(g: &CsrGraph, qs: &[usize], engines: &[Engine], base: &RunConfig) -> Result<Vec<SweepRow>> {
    ensure!(!qs.is_empty(), "no partition widths to sweep");
    let mut rows = Vec::new();
    for &q in qs {
        ensure!(q >= 1, "partition width must be at least 1");
        let layout = pcpm_core::partition::make_layout(g, q)?;
        let png = pcpm_core::png::build_png(g.adjacency(), &layout);
        let e_prime = png.e_prime();
        let r = png.compression_ratio(g.m()).unwrap_or(0.0);
        for &engine in engines {
            let cfg = RunConfig {
                engine,
                q,
                ..base.clone()
            };
            let rep = run_graph(g, &cfg)?;
            rows.push(SweepRow {
                engine,
                q,
                e_prime,
                r,
                bytes_per_iteration: rep.bytes_per_iteration(),
                scatter_secs: rep.phase_time(Phase::Scatter),
                gather_secs: rep.phase_time(Phase::Gather),
                total_secs: rep.total_secs(),
            });
        }
    }
    Ok(rows)
}

pub fn cmd_sweep(base: &RunConfig, qs: &[usize], engines: &[Engine]) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let g = load_graph(&base.input).with_context(|| format!("reading {}", base.input.display()))?;
    let rows = with_pool(base.workers, || sweep_graph(&g, qs, engines, base))??;
    if let Some(out) = &base.out {
        let f = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
        crate::report::write_sweep_csv(&rows, f)?;
    }
    Ok(rows)
}

/// Model predictions for `p`: per-engine volumes, break-even miss ratios and
/// random-access bounds at `p.r`, then the volume curve over `rs`.
pub fn cmd_model(p: &ModelParams, rs: &[f64]) -> Result<Vec<ModelLine>> {
    p.validate()?;
    for &r in rs {
        ensure!(
            r.is_finite() && r >= 1.0,
            "compression ratio must be at least 1, got {r}"
        );
    }
    let mut lines = Vec::new();
    let at = |metric, engine: Engine, value| ModelLine {
        metric,
        engine: engine.name(),
        r: p.r,
        value,
    };
    lines.push(at("comm_bytes", Engine::Pdpr, predict_pdpr_comm(p)));
    lines.push(at("comm_bytes", Engine::Bvgas, predict_bvgas_comm(p)));
    lines.push(at("comm_bytes", Engine::Pcpm, predict_pcpm_comm(p)));
    for engine in [Engine::Bvgas, Engine::Pcpm] {
        if let Some(t) = breakeven_cmr(engine, p) {
            lines.push(at("breakeven_cmr", engine, t));
        }
    }
    for engine in Engine::ALL {
        lines.push(at("random_accesses", engine, predict_random_accesses(engine, p)));
    }
    for row in sweep_model_curve(p, rs.iter().copied()) {
        for (engine, value) in [
            (Engine::Pdpr, row.pdpr),
            (Engine::Bvgas, row.bvgas),
            (Engine::Pcpm, row.pcpm),
        ] {
            lines.push(ModelLine {
                metric: "curve_bytes",
                engine: engine.name(),
                r: row.r,
                value,
            });
        }
    }
    Ok(lines)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }
}

/// Runs every internal oracle on `g` with partition width `q`:
/// PNG against brute force, the two gather loops against each other, the
/// three engines against each other in both value widths, and the counted
/// traffic of both binning engines against their closed-form volumes.
///
/// `inject_png_fault` drops one PNG entry before the PNG check, which must
/// then fail.
pub fn validate_graph(g: &CsrGraph, q: usize, inject_png_fault: bool) -> Result<ValidationReport> {
    ensure!(q >= 1, "partition width must be at least 1");
    let mut out = ValidationReport::default();
    let engine = PcpmEngine::<f64>::new(g, q, DEFAULT_DAMPING)?;

    let png = engine.png();
    let png = if inject_png_fault {
        let (p, j) = (0..png.k_src())
            .flat_map(|p| (0..png.k_dst()).map(move |j| (p, j)))
            .find(|&(p, j)| !png.group(p, j).is_empty())
            .context("graph has no edges to drop from the PNG")?;
        png.without_edge(p, j, 0)?
    } else {
        png.clone()
    };
    match validate_png(&png, g.adjacency()) {
        Ok(c) => out.push("png", true, format!("e_prime = {}", c.e_prime)),
        Err(e) => out.push("png", false, format!("{e:?}")),
    }

    let mut e = engine;
    e.scatter();
    let mut a = vec![0.0f64; g.n()];
    let mut b = vec![0.0f64; g.n()];
    bins::gather(e.bins(), &mut a, GatherKind::Branching)?;
    bins::gather(e.bins(), &mut b, GatherKind::BranchAvoiding)?;
    let same = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
    out.push("gather", same, format!("{} vertices compared bitwise", g.n()));

    for (name, width, tol) in [
        ("ranks_f64", ValueWidth::Eight, 1e-12),
        ("ranks_f32", ValueWidth::Four, 1e-6),
    ] {
        let d = cross_engine_deviation(g, q, width)?;
        out.push(name, d <= tol, format!("max deviation {d:e} (limit {tol:e})"));
    }

    let p = pcpm_traffic_mismatches::<f32>(g, q)?;
    out.push("pcpm_traffic", p.is_empty(), mismatch_detail(&p));
    let b = bvgas_traffic_mismatches::<f32>(g, q)?;
    out.push("bvgas_traffic", b.is_empty(), mismatch_detail(&b));
    Ok(out)
}

pub fn cmd_validate(input: &Path, q: usize, inject_png_fault: bool, workers: usize) -> Result<ValidationReport> {
    let g = load_graph(input).with_context(|| format!("reading {}", input.display()))?;
    with_pool(workers, || validate_graph(&g, q, inject_png_fault))?
}

fn mismatch_detail(m: &[String]) -> String {
    if m.is_empty() {
        "counted bytes equal the model".into()
    } else {
        m.join("; ")
    }
}

/// Largest difference between any two engines' ranks after the default
/// iteration count.
pub fn cross_engine_deviation(g: &CsrGraph, q: usize, width: ValueWidth) -> Result<f64> {
    let mut cfg = RunConfig::new("", Engine::Pdpr);
    cfg.q = q;
    cfg.repeats = 1;
    cfg.value_width = width;
    let ranks: Vec<Vec<f64>> = Engine::ALL
        .iter()
        .map(|&engine| run_graph(g, &RunConfig { engine, ..cfg.clone() }).map(|r| r.ranks))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..ranks.len() {
        for j in i + 1..ranks.len() {
            for (x, y) in ranks[i].iter().zip(&ranks[j]) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(worst)
}

/// Traffic of the second iteration, by phase.
fn steady_iteration<V: Value>(engine: &mut dyn RankEngine<V>) -> Result<TrafficReport> {
    engine.iterate(&mut TrafficReport::new())?;
    let mut second = TrafficReport::new();
    engine.iterate(&mut second)?;
    Ok(second)
}

fn compare(out: &mut Vec<String>, what: &str, counted: u64, predicted: f64) {
    if counted as f64 != predicted.round() || (predicted - predicted.round()).abs() > 1e-6 * predicted.max(1.0) {
        out.push(format!("{what}: counted {counted}, model {predicted}"));
    }
}

/// Compares one steady-state PCPM iteration with the partition-centric volume
/// model stream by stream, substituting the measured compression ratio.
pub fn pcpm_traffic_mismatches<V: Value>(g: &CsrGraph, q: usize) -> Result<Vec<String>> {
    use pcpm_core::analytics::{pcpm_comm_terms, ModelParams, INDEX_BYTES};
    let mut e = PcpmEngine::<V>::new(g, q, DEFAULT_DAMPING)?;
    if g.m() == 0 {
        return Ok(Vec::new());
    }
    let p = ModelParams {
        n: g.n() as f64,
        m: g.m() as f64,
        k: e.layout().k() as f64,
        r: e.compression_ratio()?,
        c_mr: 1.0,
        l: 64.0,
        d_v: V::BYTES as f64,
        d_i: INDEX_BYTES as f64,
    };
    let t = pcpm_comm_terms(&p);
    let rep = steady_iteration(&mut e)?;
    let s = rep.get(Engine::Pcpm, Phase::Scatter);
    let ga = rep.get(Engine::Pcpm, Phase::Gather);
    let mut out = Vec::new();
    compare(
        &mut out,
        "scatter reads",
        s.bytes_read,
        t.png_offsets + t.png_sources + t.rank_reads,
    );
    compare(&mut out, "update writes", s.bytes_written, t.update_writes);
    compare(&mut out, "gather reads", ga.bytes_read, t.id_reads + t.update_reads);
    compare(&mut out, "rank writes", ga.bytes_written, t.rank_writes);
    compare(&mut out, "updates", s.updates * V::BYTES as u64, t.update_writes);
    compare(&mut out, "ids", ga.ids * INDEX_BYTES, t.id_reads);
    Ok(out)
}

/// Compares one steady-state BVGAS iteration with the binning volume model.
pub fn bvgas_traffic_mismatches<V: Value>(g: &CsrGraph, q: usize) -> Result<Vec<String>> {
    use pcpm_core::analytics::{predict_bvgas_comm, ModelParams, INDEX_BYTES};
    let mut e = BvgasEngine::<V>::new(g, q, DEFAULT_DAMPING)?;
    let p = ModelParams {
        n: g.n() as f64,
        m: g.m() as f64,
        d_v: V::BYTES as f64,
        d_i: INDEX_BYTES as f64,
        ..ModelParams::default()
    };
    let rep = steady_iteration(&mut e)?;
    let total: PhaseTraffic = rep.total(Engine::Bvgas, &[Phase::Scatter, Phase::Gather]);
    let mut out = Vec::new();
    compare(&mut out, "total", total.bytes(), predict_bvgas_comm(&p));
    compare(
        &mut out,
        "messages",
        rep.get(Engine::Bvgas, Phase::Scatter).updates,
        p.m,
    );
    Ok(out)
}
