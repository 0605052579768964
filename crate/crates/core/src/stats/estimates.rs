use serde::Serialize;

use crate::eigen::{smallest_eigenpairs_any, EigenOptions};
use crate::error::Result;
use crate::graph::Graph;
use crate::partition::{ClusterAssignment, Interconnections};
use crate::rng::derive_seed;

/// Plug-in estimates of the interconnection model for one clustering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RimEstimates {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub sizes: Vec<usize>,
    /// Within-cluster edge counts `m_k`.
    pub intra_edges: Vec<usize>,
    /// Between-cluster edge counts, symmetric, zero diagonal.
    pub m_ij: Vec<Vec<usize>>,
    /// `m_ij / (n_i n_j)`, symmetric, zero diagonal.
    pub p_ij: Vec<Vec<f64>>,
    /// Pooled `2 (m - sum m_k) / (n^2 - sum n_k^2)`.
    pub p_hat: f64,
    /// Mean between-cluster edge weight.
    pub w_bar: f64,
    /// No between-cluster edges, so `w_bar` was set to 1.
    pub w_bar_defaulted: bool,
    /// `S_{2:K}` of each cluster's own Laplacian.
    pub cluster_partial_sums: Vec<f64>,
    /// `min_k S_{2:K}(L_k) / ((K - 1) n_max)`; the probability threshold for
    /// unweighted graphs and the rate threshold for weighted ones.
    pub t_lb: f64,
    /// Clusters whose induced subgraph is disconnected.
    pub disconnected_clusters: Vec<usize>,
}

impl RimEstimates {
    pub fn t_hat(&self) -> f64 {
        self.p_hat * self.w_bar
    }

    pub fn p_max(&self) -> f64 {
        self.pairs().map(|(_, _, p)| p).fold(0.0, f64::max)
    }

    /// `(i, j, p_ij)` for `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.k).flat_map(move |i| (i + 1..self.k).map(move |j| (i, j, self.p_ij[i][j])))
    }

    pub fn reliable_inputs(&self) -> bool {
        self.disconnected_clusters.is_empty()
    }
}

/// `S_{2:K}` of a single cluster subgraph, plus whether it is disconnected.
///
/// A cluster with fewer than `K` nodes contributes the sum of all its
/// nontrivial eigenvalues; a singleton contributes 0.
pub fn partial_sum_for_cluster(g: &Graph, k: usize, opts: &EigenOptions) -> Result<(f64, bool)> {
    let n = g.node_count();
    if n < 2 {
        return Ok((0.0, false));
    }
    let k_eff = k.min(n);
    let opts = EigenOptions {
        next_eigenvalue: false,
        ..*opts
    };
    let emb = smallest_eigenpairs_any(&g.laplacian(), k_eff, &opts)?;
    Ok((emb.partial_sum(), emb.disconnected))
}

/// Estimates from a graph and a clustering with `K >= 2`.
pub fn estimate_rim(
    g: &Graph,
    a: &ClusterAssignment,
    ic: &Interconnections,
    opts: &EigenOptions,
) -> Result<RimEstimates> {
    let mut est = estimate_rates(g, a, ic);
    let k = est.k;
    for (idx, c) in ic.clusters.iter().enumerate() {
        let cluster_opts = EigenOptions {
            seed: derive_seed(opts.seed, &[k as u64, idx as u64]),
            ..*opts
        };
        let (s, disconnected) = partial_sum_for_cluster(&c.graph, k, &cluster_opts)?;
        if disconnected {
            est.disconnected_clusters.push(idx);
        }
        est.cluster_partial_sums.push(s);
    }
    let n_max = *est.sizes.iter().max().expect("nonempty partition") as f64;
    let min_s = est.cluster_partial_sums.iter().copied().fold(f64::INFINITY, f64::min);
    est.t_lb = min_s / ((k - 1) as f64 * n_max);
    Ok(est)
}

/// Count-based estimates only: rates, pooled rate and mean weight. The
/// threshold is left as NaN and no eigenproblems are solved.
pub fn estimate_rates(g: &Graph, a: &ClusterAssignment, ic: &Interconnections) -> RimEstimates {
    let k = a.k();
    let n = g.node_count();
    let m = g.edge_count();
    let sizes = a.sizes().to_vec();
    let intra_edges = ic.intra_edge_counts();

    let mut m_ij = vec![vec![0usize; k]; k];
    let mut p_ij = vec![vec![0.0; k]; k];
    let mut weight_sum = 0.0;
    let mut inter = 0usize;
    for b in &ic.blocks {
        let count = b.edge_count();
        m_ij[b.i][b.j] = count;
        m_ij[b.j][b.i] = count;
        let p = count as f64 / (sizes[b.i] as f64 * sizes[b.j] as f64);
        p_ij[b.i][b.j] = p;
        p_ij[b.j][b.i] = p;
        weight_sum += b.entries().iter().map(|e| e.2).sum::<f64>();
        inter += count;
    }
    let n2 = (n as f64).powi(2) - sizes.iter().map(|&s| (s as f64).powi(2)).sum::<f64>();
    let p_hat = if n2 > 0.0 { 2.0 * inter as f64 / n2 } else { 0.0 };
    let w_bar_defaulted = inter == 0;
    let w_bar = if !g.is_weighted() || w_bar_defaulted {
        1.0
    } else {
        weight_sum / inter as f64
    };

    RimEstimates {
        k,
        n,
        m,
        sizes,
        intra_edges,
        m_ij,
        p_ij,
        p_hat,
        w_bar,
        w_bar_defaulted,
        cluster_partial_sums: Vec::with_capacity(k),
        t_lb: f64::NAN,
        disconnected_clusters: Vec::new(),
    }
}
