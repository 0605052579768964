//! External and internal clustering quality metrics.

use serde::Serialize;

use crate::error::PartitionError;
use crate::graph::Graph;
use crate::partition::ClusterAssignment;

/// Counts `n_ij` of nodes in found cluster `i` and true cluster `j`.
fn contingency(
    found: &ClusterAssignment,
    truth: &ClusterAssignment,
) -> Result<Vec<Vec<usize>>, PartitionError> {
    truth.check_len(found.len())?;
    let mut table = vec![vec![0usize; truth.k()]; found.k()];
    for (&f, &t) in found.labels().iter().zip(truth.labels()) {
        table[f][t] += 1;
    }
    Ok(table)
}

fn entropy(sizes: &[usize], n: f64) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `2 I / (H_found + H_truth)` with natural logarithms. Both entropies are
/// zero only when both partitions are the single all-node cluster, which
/// scores 1 as an exact match.
pub fn nmi(found: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64, PartitionError> {
    let table = contingency(found, truth)?;
    let n = found.len() as f64;
    let (a, b) = (found.sizes(), truth.sizes());
    let denom = entropy(a, n) + entropy(b, n);
    if denom == 0.0 {
        return Ok(1.0);
    }
    let mut info = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                info += nij / n * (n * nij / (a[i] as f64 * b[j] as f64)).ln();
            }
        }
    }
    Ok((2.0 * info / denom).clamp(0.0, 1.0))
}

fn pairs(x: usize) -> u64 {
    let x = x as u64;
    x * x.saturating_sub(1) / 2
}

/// Fraction of node pairs on which the two partitions agree.
pub fn rand_index(
    found: &ClusterAssignment,
    truth: &ClusterAssignment,
) -> Result<f64, PartitionError> {
    let table = contingency(found, truth)?;
    let total = pairs(found.len());
    if total == 0 {
        return Ok(1.0);
    }
    let tp: u64 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let same_found: u64 = found.sizes().iter().map(|&s| pairs(s)).sum();
    let same_truth: u64 = truth.sizes().iter().map(|&s| pairs(s)).sum();
    let tn = total + tp - same_found - same_truth;
    Ok((tp + tn) as f64 / total as f64)
}

/// Best F score of each found cluster against any true cluster.
pub fn f_measure_per_cluster(
    found: &ClusterAssignment,
    truth: &ClusterAssignment,
) -> Result<Vec<f64>, PartitionError> {
    let table = contingency(found, truth)?;
    let (a, b) = (found.sizes(), truth.sizes());
    Ok(table
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(j, &c)| {
                    let precision = c as f64 / a[i] as f64;
                    let recall = c as f64 / b[j] as f64;
                    2.0 * precision * recall / (precision + recall)
                })
                .fold(0.0, f64::max)
        })
        .collect())
}

/// Macro average of [`f_measure_per_cluster`] over found clusters.
pub fn f_measure(found: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64, PartitionError> {
    let per = f_measure_per_cluster(found, truth)?;
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

/// Within-cluster weight `W_in` and cut weight `W_out` per cluster.
fn cut_weights(g: &Graph, found: &ClusterAssignment) -> Result<Vec<(f64, f64)>, PartitionError> {
    found.check_len(g.node_count())?;
    let labels = found.labels();
    let mut w = vec![(0.0, 0.0); found.k()];
    for e in g.edges() {
        let (a, b) = (labels[e.u], labels[e.v]);
        if a == b {
            w[a].0 += e.w;
        } else {
            w[a].1 += e.w;
            w[b].1 += e.w;
        }
    }
    Ok(w)
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 { num / den } else { 0.0 }
}

/// `W_out / (2 W_in + W_out)` per cluster; 0 for a cluster with no
/// incident edges.
pub fn conductance_per_cluster(
    g: &Graph,
    found: &ClusterAssignment,
) -> Result<Vec<f64>, PartitionError> {
    Ok(cut_weights(g, found)?
        .into_iter()
        .map(|(w_in, w_out)| ratio(w_out, 2.0 * w_in + w_out))
        .collect())
}

/// Conductance plus `W_out / (2 (W_all - W_in) + W_out)` per cluster.
pub fn normalized_cut_per_cluster(
    g: &Graph,
    found: &ClusterAssignment,
) -> Result<Vec<f64>, PartitionError> {
    let w_all = g.total_weight();
    Ok(cut_weights(g, found)?
        .into_iter()
        .map(|(w_in, w_out)| {
            ratio(w_out, 2.0 * w_in + w_out) + ratio(w_out, 2.0 * (w_all - w_in) + w_out)
        })
        .collect())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn conductance(g: &Graph, found: &ClusterAssignment) -> Result<f64, PartitionError> {
    Ok(mean(&conductance_per_cluster(g, found)?))
}

pub fn normalized_cut(g: &Graph, found: &ClusterAssignment) -> Result<f64, PartitionError> {
    Ok(mean(&normalized_cut_per_cluster(g, found)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ri: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_per_cluster: Option<Vec<f64>>,
    pub conductance: f64,
    pub conductance_per_cluster: Vec<f64>,
    pub nc: f64,
    pub nc_per_cluster: Vec<f64>,
}

/// All metrics; the external ones only when `truth` is given.
pub fn metric_report(
    g: &Graph,
    found: &ClusterAssignment,
    truth: Option<&ClusterAssignment>,
) -> Result<MetricReport, PartitionError> {
    let conductance_per_cluster = conductance_per_cluster(g, found)?;
    let nc_per_cluster = normalized_cut_per_cluster(g, found)?;
    let (nmi, ri, f, f_per_cluster) = match truth {
        Some(t) => {
            let per = f_measure_per_cluster(found, t)?;
            (
                Some(nmi(found, t)?),
                Some(rand_index(found, t)?),
                Some(mean(&per)),
                Some(per),
            )
        }
        None => (None, None, None, None),
    };
    Ok(MetricReport {
        nmi,
        ri,
        f,
        f_per_cluster,
        conductance: mean(&conductance_per_cluster),
        conductance_per_cluster,
        nc: mean(&nc_per_cluster),
        nc_per_cluster,
    })
}
