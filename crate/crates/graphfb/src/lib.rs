//! Critically sampled two-channel filter banks on weighted graphs.
//!
//! Splits graph signals into lowpass and highpass halves with perfect
//! reconstruction on any connected undirected graph, no structural
//! assumptions (no bipartition, no circulant structure). Filters live on
//! the graph frequency axis; sampling happens in the spectral domain.
//!
//! The `examples/` directory is the guided tour, one runnable program per
//! capability:
//!
//! - `worked_example`: a 4-vertex graph with spectrum (0, 4, 5, 7), small
//!   enough to check every matrix by hand
//! - `filter_design`: brick-wall, smoothed, and biorthogonal kernels side
//!   by side on one sensor graph
//! - `transform_roundtrip`: one analysis/synthesis pass, energy split and
//!   reconstruction error
//! - `multilevel_pyramid`: depth-3 decomposition with coarsening, critical
//!   sampling at every depth
//! - `polynomial_locality`: polynomial filtering, the 6*lambda_max*M/m
//!   error bound, exact m-hop support
//! - `lowpass_error_bound`: how far a lowpass-only reconstruction can
//!   drift, sharp and relaxed bounds
//!
//! Run one with `cargo run --example worked_example`. The same machinery is
//! scriptable through the `graphfb` binary (`gen`, `design`, `analyze`,
//! `synthesize`, `metrics`, `polyfit`, `locality`, `verify`).

pub mod cli;
pub mod coarsen;
pub mod error;
pub mod filter;
pub mod graph;
pub mod io;
pub mod mallat;
pub mod metrics;
pub mod polyapprox;
pub mod sampler;
pub mod spectral;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use graph::{Graph, Signal};
