//! Per-iteration DRAM traffic and random-access models for the three engines.
//!
//! All volumes are bytes exchanged with main memory in one PageRank
//! iteration, assuming cache-line-granular transfers and full line
//! utilization for the binning engine. Destination ids written once before
//! the first iteration are not counted.

use alloc::vec::Vec;

use crate::{Engine, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Vertices.
    pub n: f64,
    /// Edges.
    pub m: f64,
    /// Partitions.
    pub k: f64,
    /// Compression ratio `m / |E'|`.
    pub r: f64,
    /// Cache miss ratio of the pull engine's random source-value reads.
    pub c_mr: f64,
    /// Cache line bytes.
    pub l: f64,
    /// Value bytes.
    pub d_v: f64,
    /// Index bytes.
    pub d_i: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n: 0.0,
            m: 0.0,
            k: 1.0,
            r: 1.0,
            c_mr: 1.0,
            l: 64.0,
            d_v: 4.0,
            d_i: 4.0,
        }
    }
}

impl ModelParams {
    /// The scale-25 Kronecker graph used for illustration: 33.5M vertices,
    /// 1070M edges, 512 partitions, 4-byte values and indices, 64-byte lines.
    pub fn kron() -> Self {
        ModelParams {
            n: 33.5e6,
            m: 1070e6,
            k: 512.0,
            r: 1.0,
            c_mr: 1.0,
            l: 64.0,
            d_v: 4.0,
            d_i: 4.0,
        }
    }

    /// Lowest attainable miss ratio: only cold misses on the value array.
    pub fn min_cmr(&self) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        (self.n * self.d_v / (self.m * self.l)).min(1.0)
    }

    /// Largest attainable compression ratio `m / n`.
    pub fn max_r(&self) -> f64 {
        if self.n == 0.0 {
            return 1.0;
        }
        (self.m / self.n).max(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n", self.n),
            ("m", self.m),
            ("k", self.k),
            ("r", self.r),
            ("c_mr", self.c_mr),
            ("l", self.l),
            ("d_v", self.d_v),
            ("d_i", self.d_i),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parameter(alloc::format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.l <= 0.0 || self.d_v <= 0.0 || self.d_i <= 0.0 {
            return Err(Error::Parameter("l, d_v and d_i must be positive".into()));
        }
        if self.r < 1.0 {
            return Err(Error::Parameter(alloc::format!("r must be at least 1, got {}", self.r)));
        }
        if self.c_mr > 1.0 || self.c_mr + 1e-12 < self.min_cmr() {
            return Err(Error::Parameter(alloc::format!(
                "c_mr {} outside [{}, 1]",
                self.c_mr,
                self.min_cmr()
            )));
        }
        Ok(())
    }
}

/// `m(d_i + c_mr l) + n(d_i + d_v)`
pub fn predict_pdpr_comm(p: &ModelParams) -> f64 {
    p.m * (p.d_i + p.c_mr * p.l) + p.n * (p.d_i + p.d_v)
}

/// `2m(d_i + d_v) + n(d_i + 2 d_v)`
pub fn predict_bvgas_comm(p: &ModelParams) -> f64 {
    2.0 * p.m * (p.d_i + p.d_v) + p.n * (p.d_i + 2.0 * p.d_v)
}

/// `m(d_i(1 + 1/r) + 2 d_v / r) + k² d_i + 2 n d_v`
pub fn predict_pcpm_comm(p: &ModelParams) -> f64 {
    pcpm_comm_terms(p).total()
}

/// The partition-centric volume split into the individual streams it sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PcpmTerms {
    /// PNG offsets scanned during scatter: `k² d_i`.
    pub png_offsets: f64,
    /// PNG source ids scanned during scatter: `(m/r) d_i`.
    pub png_sources: f64,
    /// Source values loaded during scatter: `n d_v`.
    pub rank_reads: f64,
    /// Updates written during scatter: `(m/r) d_v`.
    pub update_writes: f64,
    /// Destination ids read during gather: `m d_i`.
    pub id_reads: f64,
    /// Updates read during gather: `(m/r) d_v`.
    pub update_reads: f64,
    /// New values written after gather: `n d_v`.
    pub rank_writes: f64,
}

impl PcpmTerms {
    pub fn total(&self) -> f64 {
        self.png_offsets
            + self.png_sources
            + self.rank_reads
            + self.update_writes
            + self.id_reads
            + self.update_reads
            + self.rank_writes
    }
}

pub fn pcpm_comm_terms(p: &ModelParams) -> PcpmTerms {
    let compressed = p.m / p.r;
    PcpmTerms {
        png_offsets: p.k * p.k * p.d_i,
        png_sources: compressed * p.d_i,
        rank_reads: p.n * p.d_v,
        update_writes: compressed * p.d_v,
        id_reads: p.m * p.d_i,
        update_reads: compressed * p.d_v,
        rank_writes: p.n * p.d_v,
    }
}

/// Miss ratio above which `engine` moves fewer bytes than the pull engine,
/// to leading order in `m`. The pull engine has no threshold against itself.
pub fn breakeven_cmr(engine: Engine, p: &ModelParams) -> Option<f64> {
    match engine {
        Engine::Pdpr => None,
        Engine::Bvgas => Some((p.d_i + 2.0 * p.d_v) / p.l),
        Engine::Pcpm => Some((p.d_i + 2.0 * p.d_v) / (p.r * p.l)),
    }
}

/// Leading term of the per-iteration random DRAM access bound.
pub fn predict_random_accesses(engine: Engine, p: &ModelParams) -> f64 {
    match engine {
        Engine::Pdpr => p.m * p.c_mr,
        Engine::Bvgas => p.m * p.d_v / p.l,
        Engine::Pcpm => p.k * p.k,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelRow {
    pub r: f64,
    pub pdpr: f64,
    pub bvgas: f64,
    pub pcpm: f64,
}

/// Predicted volumes of all three engines as the compression ratio varies.
pub fn sweep_model_curve(p: &ModelParams, rs: impl IntoIterator<Item = f64>) -> Vec<ModelRow> {
    rs.into_iter()
        .map(|r| {
            let q = ModelParams { r, ..*p };
            ModelRow {
                r,
                pdpr: predict_pdpr_comm(&q),
                bvgas: predict_bvgas_comm(&q),
                pcpm: predict_pcpm_comm(&q),
            }
        })
        .collect()
}
