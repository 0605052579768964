//! Spectral clustering at a fixed model order.

use crate::eigen::{smallest_eigenpairs, EigenOptions, SpectralEmbedding};
use crate::error::{Error, Result};
use crate::graph::{Graph, NormalizeMode};
use crate::kmeans::{kmeans_with, row_normalize, KMeansOptions};
use crate::partition::ClusterAssignment;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub normalize: NormalizeMode,
    /// Scale embedding rows to unit length before k-means.
    pub row_normalize: bool,
    pub eigen: EigenOptions,
    pub kmeans: KMeansOptions,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            normalize: NormalizeMode::Degree,
            row_normalize: false,
            eigen: EigenOptions {
                next_eigenvalue: false,
                ..EigenOptions::default()
            },
            kmeans: KMeansOptions::default(),
        }
    }
}

impl SpectralOptions {
    pub fn with_normalize(normalize: NormalizeMode) -> Self {
        Self {
            normalize,
            ..Self::default()
        }
    }
}

/// K-means on the rows of the `n x (K-1)` embedding of the clustering input.
pub fn cluster_at_k(
    g: &Graph,
    k: usize,
    opts: &SpectralOptions,
    seed: u64,
) -> Result<(ClusterAssignment, SpectralEmbedding)> {
    let working = g.normalized_input(opts.normalize)?;
    cluster_working(&working, k, opts, seed)
}

/// As [`cluster_at_k`] on a graph that is already the clustering input.
pub(crate) fn cluster_working(
    working: &Graph,
    k: usize,
    opts: &SpectralOptions,
    seed: u64,
) -> Result<(ClusterAssignment, SpectralEmbedding)> {
    let n = working.node_count();
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "model order K = {k} must satisfy 2 <= K <= n = {n}"
        )));
    }
    let eigen = EigenOptions {
        seed: derive_seed(seed, &[0]),
        ..opts.eigen
    };
    let emb = smallest_eigenpairs(&working.laplacian(), k, &eigen)?;
    let points = if opts.row_normalize {
        row_normalize(&emb.y)
    } else {
        emb.y.clone()
    };
    let result = kmeans_with(&points, k, derive_seed(seed, &[1]), &opts.kmeans)?;
    Ok((result.assignment, emb))
}
