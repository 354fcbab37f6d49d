//! File formats, benchmark commands and CSV reports for the partition-centric
//! PageRank engines in `pcpm-core`.

pub mod binfmt;
pub mod edgelist;
mod error;
pub mod mtx;
pub mod report;
pub mod runner;

pub use error::{FormatError, Result};
