//! Undirected graphs with strictly positive edge weights.
//!
//! A [`Graph`] is immutable once built. Edges are canonicalized to `u < v`
//! and sorted; a symmetric CSR adjacency is kept alongside the edge list so
//! neighborhood scans and Laplacian products stay `O(m + n)`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::sparse::SymCsr;

/// One undirected edge, `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Raw edge as supplied by a caller or a file: endpoints in any order and an
/// optional weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub w: Option<f64>,
}

impl EdgeRecord {
    pub fn new(u: usize, v: usize) -> Self {
        Self { u, v, w: None }
    }

    pub fn weighted(u: usize, v: usize, w: f64) -> Self {
        Self { u, v, w: Some(w) }
    }
}

impl From<(usize, usize)> for EdgeRecord {
    fn from((u, v): (usize, usize)) -> Self {
        Self::new(u, v)
    }
}

impl From<(usize, usize, f64)> for EdgeRecord {
    fn from((u, v, w): (usize, usize, f64)) -> Self {
        Self::weighted(u, v, w)
    }
}

/// How the clustering input matrix is derived from the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizeMode {
    /// Use the adjacency (or weight) matrix as is.
    None,
    /// Symmetric degree normalization `D^{-1/2} W D^{-1/2}`.
    #[default]
    Degree,
}

impl std::str::FromStr for NormalizeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "degree" => Ok(Self::Degree),
            other => Err(format!("unknown normalize mode `{other}` (expected none|degree)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    weighted: bool,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    neighbor_weights: Vec<f64>,
    strength: Vec<f64>,
}

impl Graph {
    /// Builds a graph from raw edge records.
    ///
    /// When `n` is `None` the node count is `max id + 1`. The graph is
    /// weighted iff at least one record carries a weight; records without
    /// one then default to weight 1.
    pub fn build<I, R>(records: I, n: Option<usize>) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = R>,
        R: Into<EdgeRecord>,
    {
        let records: Vec<EdgeRecord> = records.into_iter().map(Into::into).collect();
        let weighted = records.iter().any(|r| r.w.is_some());
        let max_id = records.iter().map(|r| r.u.max(r.v)).max();
        let n = match (n, max_id) {
            (Some(n), Some(max)) if max >= n => {
                return Err(GraphError::NodeOutOfRange { id: max, n });
            }
            (Some(n), _) => n,
            (None, Some(max)) => max + 1,
            (None, None) => 0,
        };

        let mut edges = Vec::with_capacity(records.len());
        for r in &records {
            if r.u == r.v {
                return Err(GraphError::SelfLoop { node: r.u });
            }
            let w = r.w.unwrap_or(1.0);
            if !w.is_finite() || w <= 0.0 {
                return Err(GraphError::InvalidWeight { u: r.u, v: r.v, w });
            }
            edges.push(Edge {
                u: r.u.min(r.v),
                v: r.u.max(r.v),
                w,
            });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        if let Some(pair) = edges.windows(2).find(|p| p[0].u == p[1].u && p[0].v == p[1].v) {
            return Err(GraphError::DuplicateEdge {
                u: pair[0].u,
                v: pair[0].v,
            });
        }
        Ok(Self::from_canonical(n, edges, weighted))
    }

    /// Assembles a graph from edges already known to be canonical: `u < v < n`,
    /// sorted, unique, positive finite weights.
    pub(crate) fn from_canonical(n: usize, edges: Vec<Edge>, weighted: bool) -> Self {
        debug_assert!(edges.windows(2).all(|p| (p[0].u, p[0].v) < (p[1].u, p[1].v)));
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        let mut neighbor_weights = vec![0.0; 2 * edges.len()];
        let mut strength = vec![0.0; n];
        for e in &edges {
            neighbors[cursor[e.u]] = e.v;
            neighbor_weights[cursor[e.u]] = e.w;
            cursor[e.u] += 1;
            neighbors[cursor[e.v]] = e.u;
            neighbor_weights[cursor[e.v]] = e.w;
            cursor[e.v] += 1;
            strength[e.u] += e.w;
            strength[e.v] += e.w;
        }
        // Each row ends up sorted: smaller neighbors arrive through edges
        // (x, i) which precede (i, y) in the sorted edge list.
        Self {
            n,
            edges,
            weighted,
            offsets,
            neighbors,
            neighbor_weights,
            strength,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    /// Sum of all edge weights (the edge count for unweighted graphs).
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Degree (unweighted) or strength (weighted) of every node.
    pub fn strengths(&self) -> &[f64] {
        &self.strength
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.neighbor_weights[range].iter().copied())
    }

    /// Graph Laplacian `L = S - W` as a symmetric sparse matrix.
    pub fn laplacian(&self) -> SymCsr {
        let n = self.n;
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(self.neighbors.len() + n);
        let mut data = Vec::with_capacity(self.neighbors.len() + n);
        indptr.push(0);
        for i in 0..n {
            let mut diag_written = false;
            for (j, w) in self.neighbors(i) {
                if !diag_written && j > i {
                    indices.push(i);
                    data.push(self.strength[i]);
                    diag_written = true;
                }
                indices.push(j);
                data.push(-w);
            }
            if !diag_written {
                indices.push(i);
                data.push(self.strength[i]);
            }
            indptr.push(indices.len());
        }
        SymCsr::from_parts(n, indptr, indices, data)
    }

    /// The clustering input matrix, returned as a (possibly reweighted) graph.
    ///
    /// Under [`NormalizeMode::Degree`] every edge weight becomes
    /// `w / sqrt(s_u s_v)`; every node must have positive strength.
    pub fn normalized_input(&self, mode: NormalizeMode) -> Result<Graph, GraphError> {
        match mode {
            NormalizeMode::None => Ok(self.clone()),
            NormalizeMode::Degree => {
                if let Some(node) = self.strength.iter().position(|&s| s <= 0.0) {
                    return Err(GraphError::ZeroDegree { node });
                }
                let edges = self
                    .edges
                    .iter()
                    .map(|e| Edge {
                        w: e.w / (self.strength[e.u] * self.strength[e.v]).sqrt(),
                        ..*e
                    })
                    .collect();
                Ok(Self::from_canonical(self.n, edges, true))
            }
        }
    }

    /// Maximal connected node sets, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for (v, _) in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.connected_components().len() == 1
    }

    /// Subgraph induced by `nodes` (given in the order that defines the new
    /// ids 0..nodes.len()).
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i;
        }
        let mut edges = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for (v, w) in self.neighbors(u) {
                let j = local[v];
                if j != usize::MAX && i < j {
                    edges.push(Edge { u: i, v: j, w });
                }
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        Self::from_canonical(nodes.len(), edges, self.weighted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_eigenvalues(g: &Graph) -> Vec<f64> {
        let l = g.laplacian().to_dense();
        let mut ev: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    fn assert_spectrum(g: &Graph, expected: &[f64]) {
        let ev = dense_eigenvalues(g);
        assert_eq!(ev.len(), expected.len());
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10, "{ev:?} vs {expected:?}");
        }
    }

    #[test]
    fn build_unweighted_path() {
        let g = Graph::build([(0, 1), (1, 2)], None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(!g.is_weighted());
        assert!(g.edges().iter().all(|e| e.w == 1.0));
    }

    #[test]
    fn build_weighted_strength() {
        let g = Graph::build([(0, 1, 2.5), (0, 2, 0.5)], None).unwrap();
        assert!(g.is_weighted());
        assert_eq!(g.strengths()[0], 3.0);
    }

    #[test]
    fn build_canonicalizes_orientation() {
        let g = Graph::build([(2, 0), (1, 0)], None).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            Graph::build([(0, 0)], None),
            Err(GraphError::SelfLoop { node: 0 })
        ));
        assert!(matches!(
            Graph::build([(0, 1), (1, 0)], None),
            Err(GraphError::DuplicateEdge { u: 0, v: 1 })
        ));
        assert!(matches!(
            Graph::build([(0, 1, 0.0)], None),
            Err(GraphError::InvalidWeight { .. })
        ));
        assert!(matches!(
            Graph::build([(0, 1, f64::NAN)], None),
            Err(GraphError::InvalidWeight { .. })
        ));
        assert!(matches!(
            Graph::build([(0, 5)], Some(3)),
            Err(GraphError::NodeOutOfRange { id: 5, n: 3 })
        ));
    }

    #[test]
    fn laplacian_spectra_closed_forms() {
        let p3 = Graph::build([(0, 1), (1, 2)], None).unwrap();
        assert_spectrum(&p3, &[0.0, 1.0, 3.0]);

        let k4 = Graph::build([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap();
        assert_spectrum(&k4, &[0.0, 4.0, 4.0, 4.0]);

        let star = Graph::build((1..10).map(|v| (0, v)), None).unwrap();
        let mut expected = vec![0.0];
        expected.extend(std::iter::repeat_n(1.0, 8));
        expected.push(10.0);
        assert_spectrum(&star, &expected);
    }

    #[test]
    fn normalization() {
        let k2 = Graph::build([(0, 1)], None).unwrap();
        let nk2 = k2.normalized_input(NormalizeMode::Degree).unwrap();
        assert_eq!(nk2.edges()[0].w, 1.0);

        let tri = Graph::build([(0, 1), (1, 2), (0, 2)], None).unwrap();
        let ntri = tri.normalized_input(NormalizeMode::Degree).unwrap();
        assert!(ntri.edges().iter().all(|e| (e.w - 0.5).abs() < 1e-15));
        assert_eq!(tri.normalized_input(NormalizeMode::None).unwrap(), tri);

        let isolated = Graph::build([(0, 1)], Some(3)).unwrap();
        assert!(matches!(
            isolated.normalized_input(NormalizeMode::Degree),
            Err(GraphError::ZeroDegree { node: 2 })
        ));
    }

    #[test]
    fn components() {
        let p3 = Graph::build([(0, 1), (1, 2)], None).unwrap();
        assert_eq!(p3.connected_components(), vec![vec![0, 1, 2]]);
        let g = Graph::build([(0, 1)], Some(3)).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2]]);
        let empty = Graph::build(Vec::<(usize, usize)>::new(), Some(3)).unwrap();
        assert_eq!(empty.connected_components(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let g = Graph::build([(0, 1), (1, 2), (2, 3), (0, 2)], None).unwrap();
        let sub = g.induced_subgraph(&[2, 0, 1]);
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edge_count(), 3);
    }
}
