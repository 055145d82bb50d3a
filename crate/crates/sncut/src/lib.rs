//! Clustering for signed weighted graphs.
//!
//! A signed graph carries both attraction (positive weights) and repulsion
//! (negative weights). This crate builds such graphs from vector embeddings
//! plus synonym/antonym constraints, relaxes the signed normalized cut
//! objective through the spectrum of a signed Laplacian, rounds the relaxed
//! solution to a hard partition, and scores partitions against external
//! references (thesaurus consistency, gold classes, similarity ratings).
//!
//! Modules:
//! - [`sgraph`]: signed graph storage, Laplacians, cut/volume/objective.
//! - [`construct`]: embeddings, heat kernel, thesaurus sign constraints.
//! - [`spectral`]: relaxed solution from the smallest eigenpairs.
//! - [`discrete`]: alternating rounding of the relaxed solution.
//! - [`metrics`]: partition quality measures and reports.
//! - [`synth`]: planted-partition generators and exhaustive baselines.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); `f64` is
//! the default type parameter and the concrete aliases below pin it.

pub mod construct;
pub mod discrete;
mod eigen;
pub mod error;
pub mod metrics;
mod scalar;
pub mod sgraph;
pub mod spectral;
mod svd;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use sgraph::{Partition, SignedDegree, SignedGraph};

/// Signed graph over `f64` weights.
pub type Graph64 = sgraph::SignedGraph<f64>;
/// Signed graph over `f32` weights.
pub type Graph32 = sgraph::SignedGraph<f32>;
/// Relaxed spectral solution over `f64`.
pub type Relaxed64 = spectral::RelaxedSolution<f64>;
/// Embedding table over `f64`.
pub type Embeddings64 = construct::EmbeddingTable<f64>;
