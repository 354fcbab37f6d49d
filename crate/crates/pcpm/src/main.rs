use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pcpm::report::{write_model_csv, write_sweep_csv, write_traffic_csv};
use pcpm::runner::{self, GenerateArgs, RunConfig, ValueWidth};
use pcpm_core::analytics::ModelParams;
use pcpm_core::pcpm::{DEFAULT_DAMPING, DEFAULT_ITERATIONS};
use pcpm_core::rmat::RmatProbs;
use pcpm_core::{Engine, DEFAULT_PARTITION_WIDTH};

#[derive(Parser)]
#[command(name = "pcpm", version, about = "Partition-centric PageRank benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between edge-list, Matrix Market and binary CSR (.pcsr) files.
    Convert { input: PathBuf, output: PathBuf },
    /// Write an RMAT graph.
    Generate {
        #[arg(long)]
        scale: u32,
        #[arg(long, default_value_t = 16)]
        edge_factor: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = RmatProbs::GRAPH500.a)]
        a: f64,
        #[arg(long, default_value_t = RmatProbs::GRAPH500.b)]
        b: f64,
        #[arg(long, default_value_t = RmatProbs::GRAPH500.c)]
        c: f64,
        #[arg(long, default_value_t = RmatProbs::GRAPH500.d)]
        d: f64,
        output: PathBuf,
    },
    /// Run PageRank with one engine and report times and traffic.
    Run {
        input: PathBuf,
        #[arg(long, default_value = "pcpm", value_parser = parse_engine)]
        engine: Engine,
        /// Partition width (bin width for bvgas) in vertices.
        #[arg(long, default_value_t = DEFAULT_PARTITION_WIDTH)]
        q: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run engines over a list of partition widths and emit CSV.
    Sweep {
        input: PathBuf,
        /// Comma-separated partition widths.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "pcpm,bvgas", value_parser = parse_engine)]
        engine: Vec<Engine>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the traffic models and emit CSV.
    Model(ModelArgs),
    /// Run every internal oracle on a graph.
    Validate {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PARTITION_WIDTH)]
        q: usize,
        /// Drop one PNG entry first; the PNG check must then fail.
        #[arg(long)]
        inject_png_fault: bool,
        #[arg(long, env = "PCPM_WORKERS")]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    damping: f64,
    #[arg(long, env = "PCPM_WORKERS")]
    workers: Option<usize>,
    #[arg(long, default_value_t = runner::DEFAULT_REPEATS)]
    repeats: usize,
    /// Include counted traffic in the output.
    #[arg(long)]
    count_traffic: bool,
    /// Bytes per rank value: 4 or 8.
    #[arg(long, default_value_t = 4)]
    value_width: u8,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = ModelParams::kron().n)]
    n: f64,
    #[arg(long, default_value_t = ModelParams::kron().m)]
    m: f64,
    /// Partitions; defaults to ceil(n / q).
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_PARTITION_WIDTH)]
    q: usize,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    cmr: f64,
    #[arg(long, default_value_t = 64.0)]
    l: f64,
    #[arg(long, default_value_t = 4.0)]
    dv: f64,
    #[arg(long, default_value_t = 4.0)]
    di: f64,
    /// Comma-separated compression ratios for the volume curve.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,8,10,12,16,20,24,28,32")]
    r_sweep: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: pcpm_core::Error| e.to_string())
}

fn config(input: PathBuf, engine: Engine, q: usize, c: &Common) -> Result<RunConfig> {
    Ok(RunConfig {
        input,
        engine,
        q,
        iterations: c.iters,
        damping: c.damping,
        workers: c.workers.unwrap_or_else(runner::default_workers),
        repeats: c.repeats,
        value_width: ValueWidth::from_bytes(c.value_width)?,
        count_traffic: c.count_traffic,
        out: c.out.clone(),
    })
}

fn csv_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Convert { input, output } => {
            let g = runner::cmd_convert(&input, &output)?;
            println!("wrote {} vertices, {} edges to {}", g.n(), g.m(), output.display());
        }
        Command::Generate {
            scale,
            edge_factor,
            seed,
            a,
            b,
            c,
            d,
            output,
        } => {
            let args = GenerateArgs {
                scale,
                edge_factor,
                seed,
                probs: RmatProbs { a, b, c, d },
            };
            let g = runner::cmd_generate(&args, &output)?;
            println!("wrote {} vertices, {} edges to {}", g.n(), g.m(), output.display());
        }
        Command::Run {
            input,
            engine,
            q,
            common,
        } => {
            let cfg = config(input, engine, q, &common)?;
            let rep = runner::cmd_run(&cfg)?;
            println!("engine: {}", rep.engine);
            println!("vertices: {}", rep.n);
            println!("edges: {}", rep.m);
            println!("iterations: {}", rep.iterations);
            println!("repeats: {}", rep.repeats);
            println!("value_bytes: {}", rep.value_bytes);
            println!("preprocess_s: {}", rep.preprocess_secs);
            for (phase, secs) in &rep.phase_secs {
                println!("{}_s: {secs}", phase.name());
            }
            println!("total_s: {}", rep.total_secs());
            if let Some(e) = rep.e_prime {
                println!("e_prime: {e}");
            }
            if let Some(r) = rep.r {
                println!("r: {r}");
            }
            println!("checksum: {}", rep.checksum);
            if cfg.count_traffic && cfg.out.is_none() {
                println!();
                write_traffic_csv(&rep.traffic, io::stdout().lock())?;
            }
        }
        Command::Sweep {
            input,
            q,
            engine,
            common,
        } => {
            let first = q.first().copied().unwrap_or(DEFAULT_PARTITION_WIDTH);
            let mut cfg = config(input, Engine::Pcpm, first, &common)?;
            let out = cfg.out.take();
            let rows = runner::cmd_sweep(&cfg, &q, &engine)?;
            write_sweep_csv(&rows, csv_sink(&out)?)?;
        }
        Command::Model(m) => {
            let k = m.k.unwrap_or_else(|| (m.n / m.q.max(1) as f64).ceil());
            let p = ModelParams {
                n: m.n,
                m: m.m,
                k,
                r: m.r,
                c_mr: m.cmr,
                l: m.l,
                d_v: m.dv,
                d_i: m.di,
            };
            let lines = runner::cmd_model(&p, &m.r_sweep)?;
            write_model_csv(&lines, csv_sink(&m.out)?)?;
        }
        Command::Validate {
            input,
            q,
            inject_png_fault,
            workers,
        } => {
            let workers = workers.unwrap_or_else(runner::default_workers);
            let rep = runner::cmd_validate(&input, q, inject_png_fault, workers)?;
            for c in &rep.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(rep.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
