//! Synthetic Markov ground truths and the rate-experiment harness.

mod gibbs;
mod rate;

pub use gibbs::{
    gauss_legendre, gibbs_density, gibbs_tensor, EdgeKind, EdgePotential, GibbsSpec, VertexKind,
    VertexPotential,
};
pub use rate::{
    run_rate_experiment, top_half_slope, GraphSource, Method, RateCell, RateConfig, RateReport,
    RateRow, TruthSource,
};
