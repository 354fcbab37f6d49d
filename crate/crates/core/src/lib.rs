//! Partition-centric PageRank and sparse matrix-vector kernels.
//!
//! The crate is `no_std` with `alloc`. Enabling the `parallel` feature (on by
//! default) pulls in `std` and runs scatter and gather phases on the rayon
//! pool that is current at call time.
//!
//! Three PageRank engines are provided so they can be checked against each
//! other:
//!
//! * [`pcpm::PcpmEngine`]: partition-centric scatter over the partition-node
//!   graph ([`png::Png`]) with MSB-demarcated destination bins.
//! * [`baselines::PdprEngine`]: pull-direction PageRank over the transposed
//!   graph.
//! * [`baselines::BvgasEngine`]: vertex-centric binning with per-worker message
//!   spaces and cache-line staging buffers.
//!
//! Every engine phase returns a [`analytics::PhaseTraffic`] with the logical
//! bytes it moved through its large buffers, which is what the closed-form
//! models in [`analytics::model`] predict.

#![no_std]
#![deny(rust_2018_idioms)]

extern crate alloc;
#[cfg(feature = "parallel")]
extern crate std;

pub mod analytics;
pub mod baselines;
pub mod bins;
mod error;
pub mod graph;
mod par;
pub mod partition;
pub mod pcpm;
pub mod png;
pub mod rmat;
pub mod spmv;
mod value;

pub use error::{Error, Result};
pub use graph::{Adjacency, CsrGraph, Degrees, EdgeList, Weights, MAX_VERTICES};
pub use partition::{partition_of, PartitionLayout, DEFAULT_PARTITION_WIDTH};
pub use pcpm::{pcpm_pagerank, PcpmEngine};
pub use png::Png;
pub use value::Value;

/// Which PageRank engine a report or prediction refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Pdpr,
    Bvgas,
    Pcpm,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Pdpr, Engine::Bvgas, Engine::Pcpm];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Pdpr => "pdpr",
            Engine::Bvgas => "bvgas",
            Engine::Pcpm => "pcpm",
        }
    }
}

impl core::fmt::Display for Engine {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pdpr" => Ok(Engine::Pdpr),
            "bvgas" => Ok(Engine::Bvgas),
            "pcpm" => Ok(Engine::Pcpm),
            _ => Err(Error::Parameter(alloc::format!("unknown engine `{s}`"))),
        }
    }
}
