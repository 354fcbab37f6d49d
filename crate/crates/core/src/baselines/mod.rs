//! Reference engines used for differential checks and traffic comparison.

mod bvgas;
mod pdpr;

pub use bvgas::{bvgas_gather, bvgas_pagerank, bvgas_scatter, BvgasBins, BvgasEngine, STAGING_BYTES};
pub use pdpr::{pdpr_pagerank, PdprEngine};
