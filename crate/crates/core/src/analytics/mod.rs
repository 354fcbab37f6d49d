//! Closed-form traffic models and the counters that measure what they predict.

mod cache;
pub mod model;
mod traffic;

pub use cache::{estimate_pdpr_miss_ratio, LruLineCache};
pub use model::{
    breakeven_cmr, pcpm_comm_terms, predict_bvgas_comm, predict_pcpm_comm, predict_pdpr_comm, predict_random_accesses,
    sweep_model_curve, ModelParams, ModelRow, PcpmTerms,
};
pub use traffic::{Phase, PhaseTraffic, TrafficReport, TrafficRow, INDEX_BYTES};
