//! Seeded random graphs: Erdos-Renyi, Watts-Strogatz, deterministic cluster
//! archetypes, and random interconnection models built from them.

use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::GenerateError;
use crate::graph::{EdgeRecord, Graph};
use crate::partition::ClusterAssignment;
use crate::rng::{rng_for, Rng};

pub const CONNECTIVITY_ATTEMPTS: usize = 100;

/// Upper quantile at which exponential weights are truncated.
const WEIGHT_TRUNCATION: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClusterKind {
    ErdosRenyi { p: f64 },
    WattsStrogatz { k_neighbors: usize, rewire: f64 },
    Complete,
    Star,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    #[serde(flatten)]
    pub kind: ClusterKind,
    pub size: usize,
}

/// One probability for every pair, or a full symmetric `K x K` matrix
/// (diagonal ignored).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Interconnection {
    Homogeneous(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum WeightLaw {
    #[default]
    Unit,
    /// Exponential truncated at its 0.999 quantile, scaled so the
    /// truncated mean equals `mean`.
    Exponential { mean: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RimSpec {
    pub clusters: Vec<ClusterSpec>,
    pub interconnection: Interconnection,
    #[serde(default)]
    pub weights: WeightLaw,
}

impl RimSpec {
    pub fn homogeneous(clusters: Vec<ClusterSpec>, p: f64) -> Self {
        Self {
            clusters,
            interconnection: Interconnection::Homogeneous(p),
            weights: WeightLaw::Unit,
        }
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn n(&self) -> usize {
        self.clusters.iter().map(|c| c.size).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.size).collect()
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        match &self.interconnection {
            Interconnection::Homogeneous(p) => *p,
            Interconnection::Matrix(m) => m[i][j],
        }
    }

    /// `K x K` interconnection matrix with zero diagonal.
    pub fn p_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.k();
        (0..k)
            .map(|i| (0..k).map(|j| if i == j { 0.0 } else { self.p(i, j) }).collect())
            .collect()
    }

    /// Copy with every interconnection probability set to `p`.
    pub fn with_homogeneous(&self, p: f64) -> Self {
        Self {
            interconnection: Interconnection::Homogeneous(p),
            ..self.clone()
        }
    }

    pub fn mean_weight(&self) -> f64 {
        match self.weights {
            WeightLaw::Unit => 1.0,
            WeightLaw::Exponential { mean } => mean,
        }
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |msg: String| Err(GenerateError::InvalidSpec(msg));
        if self.clusters.is_empty() {
            return bad("at least one cluster is required".into());
        }
        for (idx, c) in self.clusters.iter().enumerate() {
            if c.size == 0 {
                return bad(format!("cluster {idx} has size 0"));
            }
            match c.kind {
                ClusterKind::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => {
                    return bad(format!("cluster {idx}: p = {p} outside [0, 1]"));
                }
                ClusterKind::WattsStrogatz { k_neighbors, rewire } => {
                    check_watts_strogatz(c.size, k_neighbors, rewire)
                        .map_err(|e| GenerateError::InvalidSpec(format!("cluster {idx}: {e}")))?;
                }
                ClusterKind::Star if c.size < 2 => {
                    return bad(format!("cluster {idx}: a star needs at least 2 nodes"));
                }
                _ => {}
            }
        }
        let k = self.k();
        match &self.interconnection {
            Interconnection::Homogeneous(p) => {
                if !(0.0..=1.0).contains(p) {
                    return bad(format!("interconnection probability {p} outside [0, 1]"));
                }
            }
            Interconnection::Matrix(m) => {
                if m.len() != k || m.iter().any(|r| r.len() != k) {
                    return bad(format!("interconnection matrix must be {k} x {k}"));
                }
                for (i, row) in m.iter().enumerate() {
                    for (j, &pij) in row.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        if !(0.0..=1.0).contains(&pij) {
                            return bad(format!("p[{i}][{j}] = {pij} outside [0, 1]"));
                        }
                        if pij != m[j][i] {
                            return bad(format!("interconnection matrix not symmetric at ({i}, {j})"));
                        }
                    }
                }
            }
        }
        if let WeightLaw::Exponential { mean } = self.weights {
            if !(mean.is_finite() && mean > 0.0) {
                return bad(format!("weight mean {mean} must be positive"));
            }
        }
        Ok(())
    }
}

fn check_watts_strogatz(n: usize, k_neighbors: usize, rewire: f64) -> Result<(), GenerateError> {
    if !k_neighbors.is_multiple_of(2) || k_neighbors >= n {
        return Err(GenerateError::InvalidSpec(format!(
            "k_neighbors = {k_neighbors} must be even and below n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&rewire) {
        return Err(GenerateError::InvalidSpec(format!("rewire probability {rewire} outside [0, 1]")));
    }
    Ok(())
}

fn er_edges(n: usize, p: f64, rng: &mut Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// `G(n, p)`: each pair present independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng_for(seed, &[]);
    Graph::build(er_edges(n, p, &mut rng), Some(n)).expect("canonical edges")
}

fn ws_edges(n: usize, k_neighbors: usize, rewire: f64, rng: &mut Rng) -> Vec<(usize, usize)> {
    let half = k_neighbors / 2;
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    let mut lattice = Vec::with_capacity(n * half);
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
            lattice.push((u, v));
        }
    }
    let mut edges = Vec::with_capacity(lattice.len());
    for (u, v) in lattice {
        let free = n - 1 - adj[u].len();
        if free > 0 && rng.random::<f64>() < rewire {
            // Uniform among nodes not adjacent to u (and not u itself).
            let mut target = rng.random_range(0..free);
            let mut w = 0;
            loop {
                if w != u && !adj[u].contains(&w) {
                    if target == 0 {
                        break;
                    }
                    target -= 1;
                }
                w += 1;
            }
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
            edges.push((u.min(w), u.max(w)));
        } else {
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges
}

/// Ring lattice with `k_neighbors` neighbors per node; each lattice edge has
/// one endpoint rewired with probability `rewire`.
pub fn watts_strogatz(
    n: usize,
    k_neighbors: usize,
    rewire: f64,
    seed: u64,
) -> Result<Graph, GenerateError> {
    check_watts_strogatz(n, k_neighbors, rewire)?;
    let mut rng = rng_for(seed, &[]);
    Ok(Graph::build(ws_edges(n, k_neighbors, rewire, &mut rng), Some(n)).expect("canonical edges"))
}

fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::build(complete_edges(n), Some(n)).expect("canonical edges")
}

/// Star with hub 0.
pub fn star_graph(n: usize) -> Result<Graph, GenerateError> {
    if n < 2 {
        return Err(GenerateError::InvalidSpec("a star needs at least 2 nodes".into()));
    }
    Ok(Graph::build((1..n).map(|v| (0, v)), Some(n)).expect("canonical edges"))
}

fn cluster_edges(
    spec: &ClusterSpec,
    idx: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>, GenerateError> {
    let n = spec.size;
    let random = match spec.kind {
        ClusterKind::Complete => return Ok(complete_edges(n)),
        ClusterKind::Star => return Ok((1..n).map(|v| (0, v)).collect()),
        ClusterKind::ErdosRenyi { .. } | ClusterKind::WattsStrogatz { .. } => true,
    };
    debug_assert!(random);
    for attempt in 0..CONNECTIVITY_ATTEMPTS {
        let mut rng = rng_for(seed, &[0, idx as u64, attempt as u64]);
        let edges = match spec.kind {
            ClusterKind::ErdosRenyi { p } => er_edges(n, p, &mut rng),
            ClusterKind::WattsStrogatz { k_neighbors, rewire } => {
                ws_edges(n, k_neighbors, rewire, &mut rng)
            }
            _ => unreachable!(),
        };
        if n == 1 || Graph::build(edges.iter().copied(), Some(n)).expect("canonical").is_connected() {
            return Ok(edges);
        }
    }
    Err(GenerateError::ConnectivityExhausted {
        cluster: idx,
        attempts: CONNECTIVITY_ATTEMPTS,
    })
}

/// Scale `theta` such that `Exp(theta)` truncated at its 0.999 quantile has
/// mean `mean`.
fn truncated_exponential_scale(mean: f64) -> f64 {
    let tail = 1.0 - WEIGHT_TRUNCATION;
    // E[X | X <= q] = theta (1 - tail ln(1/tail) / (1 - tail)).
    mean / (1.0 - tail * (1.0 / tail).ln() / WEIGHT_TRUNCATION)
}

fn draw_weight(law: WeightLaw, theta: f64, rng: &mut Rng) -> Option<f64> {
    match law {
        WeightLaw::Unit => None,
        WeightLaw::Exponential { .. } => {
            let u: f64 = rng.random();
            // Inverse cdf restricted to [0, 0.999); never returns 0 for u > 0.
            let w = -theta * (1.0 - u * WEIGHT_TRUNCATION).ln();
            Some(if w > 0.0 { w } else { f64::MIN_POSITIVE })
        }
    }
}

/// Samples a graph from the random interconnection model.
///
/// Nodes are numbered cluster by cluster. Every cluster and every cluster
/// pair draws from its own seed stream, so changing one interconnection
/// probability leaves all other blocks unchanged.
pub fn generate_rim(spec: &RimSpec, seed: u64) -> Result<(Graph, ClusterAssignment), GenerateError> {
    spec.validate()?;
    let sizes = spec.sizes();
    let mut offsets = vec![0usize; sizes.len() + 1];
    for (i, s) in sizes.iter().enumerate() {
        offsets[i + 1] = offsets[i] + s;
    }
    let n = offsets[sizes.len()];
    let weighted = matches!(spec.weights, WeightLaw::Exponential { .. });
    let theta = truncated_exponential_scale(spec.mean_weight());

    let mut records: Vec<EdgeRecord> = Vec::new();
    for (idx, c) in spec.clusters.iter().enumerate() {
        let base = offsets[idx];
        for (u, v) in cluster_edges(c, idx, seed)? {
            records.push(EdgeRecord {
                u: base + u,
                v: base + v,
                w: weighted.then_some(1.0),
            });
        }
    }
    let k = spec.k();
    for i in 0..k {
        for j in i + 1..k {
            let p = spec.p(i, j);
            let mut rng = rng_for(seed, &[1, i as u64, j as u64]);
            for u in offsets[i]..offsets[i + 1] {
                for v in offsets[j]..offsets[j + 1] {
                    if rng.random::<f64>() < p {
                        let w = draw_weight(spec.weights, theta, &mut rng);
                        records.push(EdgeRecord { u, v, w });
                    }
                }
            }
        }
    }
    let graph = Graph::build(records, Some(n)).expect("generated edges are canonical");
    let labels = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
    let truth = ClusterAssignment::new(labels).expect("sizes are positive");
    Ok((graph, truth))
}
