//! Spectral graph clustering with automated model-order selection.
//!
//! The crate builds on a small set of pieces: [`Graph`] and its Laplacian,
//! a Lanczos eigensolver for the smallest nontrivial eigenpairs, seeded
//! k-means, the homogeneity and phase-transition tests of the random
//! interconnection model, and the AMOS loop that ties them together.
//! Generators, a phase-transition lab and clustering metrics support
//! simulation studies.

pub mod amos;
pub mod eigen;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod kmeans;
pub mod metrics;
pub mod partition;
pub mod phase;
pub mod rng;
pub mod sparse;
pub mod spectral;
pub mod stats;

pub use eigen::{
    partial_eigenvalue_sum, smallest_eigenpairs, EigenOptions, PartialEigsum, SpectralEmbedding,
};
pub use error::{Error, Result};
pub use graph::{Edge, EdgeRecord, Graph, NormalizeMode};
pub use partition::{extract_interconnections, ClusterAssignment, InterconnectionMatrix};
pub use sparse::SymCsr;
