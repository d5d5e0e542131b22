//! Graph resilience certification and Markov-structured histogram density
//! estimation.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: undirected graphs, vertex sets, graph families and
//!   enumeration.
//! * [`resilience`]: disintegrations, the exact resilience solver and the
//!   constructive upper bounds, all of which return checkable certificates.
//! * [`tensor`]: probability tensors on the `b^d` bin grid, histogram
//!   densities, centroid discretization and conditional-independence checks.
//! * [`cover`]: constructive ℓ¹ covers of Markov tensor classes and the
//!   covering-number / sample-complexity calculators.
//! * [`estimator`]: Scheffé selection and the structured estimators.
//! * [`synth`]: Gibbs ground truths and the rate-experiment harness.
//! * [`verify`]: randomized lemma checks used by the CLI and the tests.
//!
//! Batch work (Monte Carlo trials, cover scans, pairwise statistics) goes
//! through [`exec`], which uses rayon when the `parallel` feature is on and
//! falls back to plain iterators otherwise. Results never depend on the
//! thread count.

pub mod cover;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod graph;
pub mod resilience;
pub mod seed;
pub mod synth;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{FamilySpec, Graph, VertexSet};

/// Version string embedded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
