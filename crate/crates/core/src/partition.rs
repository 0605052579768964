//! Cluster assignments and the block structure they induce on a graph.

use serde::{Deserialize, Serialize};

use crate::error::PartitionError;
use crate::graph::Graph;

/// Node-to-cluster labels with every cluster in `0..k` nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
}

impl ClusterAssignment {
    /// Labels must use every value in `0..=max`.
    pub fn new(labels: Vec<usize>) -> Result<Self, PartitionError> {
        let k = labels.iter().max().map(|&m| m + 1).ok_or(PartitionError::NoNodes)?;
        let mut sizes = vec![0; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        if let Some(cluster) = sizes.iter().position(|&s| s == 0) {
            return Err(PartitionError::EmptyCluster { cluster });
        }
        Ok(Self { labels, k, sizes })
    }

    /// Relabels arbitrary labels to `0..k` in order of first appearance.
    pub fn from_arbitrary(labels: &[usize]) -> Result<Self, PartitionError> {
        let mut map = std::collections::HashMap::new();
        let compact = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self::new(compact)
    }

    /// Every node in one cluster.
    pub fn single(n: usize) -> Result<Self, PartitionError> {
        Self::new(vec![0; n])
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Member nodes of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (node, &l) in self.labels.iter().enumerate() {
            out[l].push(node);
        }
        out
    }

    pub fn check_len(&self, n: usize) -> Result<(), PartitionError> {
        if self.labels.len() != n {
            return Err(PartitionError::LengthMismatch {
                expected: n,
                got: self.labels.len(),
            });
        }
        Ok(())
    }
}

/// Between-cluster block `C_ij` of the adjacency matrix, rows indexed by the
/// members of cluster `i` and columns by those of cluster `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterconnectionMatrix {
    pub i: usize,
    pub j: usize,
    rows: usize,
    cols: usize,
    /// Nonzeros as (row, col, weight) in local coordinates.
    entries: Vec<(usize, usize, f64)>,
}

impl InterconnectionMatrix {
    pub fn new(i: usize, j: usize, rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(entries.iter().all(|&(r, c, _)| r < rows && c < cols));
        Self {
            i,
            j,
            rows,
            cols,
            entries,
        }
    }

    /// Builds a block from a dense row-major 0/1 (or weight) pattern.
    pub fn from_dense(i: usize, j: usize, dense: &[Vec<f64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let entries = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                assert_eq!(row.len(), cols, "ragged dense block");
                row.iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0.0)
                    .map(move |(c, &w)| (r, c, w))
            })
            .collect();
        Self::new(i, j, rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Number of between-cluster edges `m_ij`.
    pub fn edge_count(&self) -> usize {
        self.entries.len()
    }

    /// Mean weight of the nonzeros, `None` when the block is empty.
    pub fn mean_weight(&self) -> Option<f64> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.iter().map(|e| e.2).sum::<f64>() / self.entries.len() as f64)
        }
    }

    /// Nonzero count of each row (edge presence, weights ignored).
    pub fn row_counts(&self) -> Vec<usize> {
        let mut x = vec![0; self.rows];
        for &(r, _, _) in &self.entries {
            x[r] += 1;
        }
        x
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, w)| (c, r, w)).collect();
        entries.sort_by_key(|e| (e.0, e.1));
        Self::new(self.j, self.i, self.cols, self.rows, entries)
    }

    /// Row-permuted copy: new row `r` is old row `perm[r]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        let mut inverse = vec![0; self.rows];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let entries = self.entries.iter().map(|&(r, c, w)| (inverse[r], c, w)).collect();
        Self::new(self.i, self.j, self.rows, self.cols, entries)
    }
}

/// Within-cluster subgraph with its global node ids.
#[derive(Debug, Clone)]
pub struct ClusterSubgraph {
    pub nodes: Vec<usize>,
    pub graph: Graph,
}

/// Block decomposition of a graph under a cluster assignment.
#[derive(Debug, Clone)]
pub struct Interconnections {
    /// One block per unordered pair `i < j`, in lexicographic order.
    pub blocks: Vec<InterconnectionMatrix>,
    pub clusters: Vec<ClusterSubgraph>,
}

impl Interconnections {
    pub fn intra_edge_counts(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.graph.edge_count()).collect()
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&InterconnectionMatrix> {
        let (i, j) = (i.min(j), i.max(j));
        self.blocks.iter().find(|b| b.i == i && b.j == j)
    }
}

/// Splits `g` into per-cluster induced subgraphs and the `K(K-1)/2`
/// between-cluster blocks.
pub fn extract_interconnections(
    g: &Graph,
    a: &ClusterAssignment,
) -> Result<Interconnections, PartitionError> {
    a.check_len(g.node_count())?;
    let k = a.k();
    let members = a.members();
    let mut local = vec![0usize; g.node_count()];
    for m in &members {
        for (idx, &node) in m.iter().enumerate() {
            local[node] = idx;
        }
    }
    let pair_index = |i: usize, j: usize| i * k - i * (i + 1) / 2 + (j - i - 1);
    let mut entries: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); k * (k - 1) / 2];
    let labels = a.labels();
    for e in g.edges() {
        let (lu, lv) = (labels[e.u], labels[e.v]);
        if lu == lv {
            continue;
        }
        let (i, j, ri, cj) = if lu < lv {
            (lu, lv, local[e.u], local[e.v])
        } else {
            (lv, lu, local[e.v], local[e.u])
        };
        entries[pair_index(i, j)].push((ri, cj, e.w));
    }
    let mut blocks = Vec::with_capacity(entries.len());
    let mut iter = entries.into_iter();
    for i in 0..k {
        for j in i + 1..k {
            let mut e = iter.next().expect("pair count");
            e.sort_by_key(|x| (x.0, x.1));
            blocks.push(InterconnectionMatrix::new(i, j, members[i].len(), members[j].len(), e));
        }
    }
    let clusters = members
        .into_iter()
        .map(|nodes| ClusterSubgraph {
            graph: g.induced_subgraph(&nodes),
            nodes,
        })
        .collect();
    Ok(Interconnections { blocks, clusters })
}
