//! Automated model-order selection.
//!
//! Starting at `K = 2`, each model order is clustered spectrally and then
//! screened in two stages. The V-test checks that every between-cluster
//! block looks like i.i.d. Bernoulli noise; any rejection moves on to
//! `K + 1`. Survivors face a phase-transition test: when the pooled rate
//! passes the GLRT homogeneity interval the clustering is reliable iff
//! `p_hat * w_bar < t_lb`; otherwise the pairwise rates must all clear the
//! Anscombe-based confidence check against `t_lb / w_bar`.

use serde::Serialize;

use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::graph::{Graph, NormalizeMode};
use crate::kmeans::KMeansOptions;
use crate::partition::{extract_interconnections, ClusterAssignment};
use crate::rng::derive_seed;
use crate::spectral::{cluster_working, SpectralOptions};
use crate::stats::{
    estimate_rates, estimate_rim, glrt_homogeneity_check, inhomogeneous_phase_test, rim_test,
    RimEstimates,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmosOptions {
    /// Per-pair V-test level.
    pub eta: f64,
    /// GLRT homogeneity level.
    pub alpha: f64,
    /// Inhomogeneous phase-test level.
    pub alpha_prime: f64,
    /// Largest model order tried; `None` means `ceil(n / 4)`.
    pub k_max: Option<usize>,
    pub normalize: NormalizeMode,
    pub row_normalize: bool,
    pub eigen: EigenOptions,
    pub seed: u64,
}

impl Default for AmosOptions {
    fn default() -> Self {
        Self {
            eta: 1e-5,
            alpha: 0.05,
            alpha_prime: 0.05,
            k_max: None,
            normalize: NormalizeMode::Degree,
            row_normalize: false,
            eigen: EigenOptions {
                next_eigenvalue: false,
                ..EigenOptions::default()
            },
            seed: 0,
        }
    }
}

impl AmosOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn resolved_k_max(&self, n: usize) -> usize {
        self.k_max.unwrap_or(n.div_ceil(4)).min(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Reliable,
    KmaxReached,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Reliable => "reliable",
            Self::KmaxReached => "kmax_reached",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseBranch {
    Homogeneous,
    Inhomogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlrtSummary {
    pub statistic: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseOutcome {
    pub branch: PhaseBranch,
    /// `p_hat * w_bar`.
    pub t_hat: f64,
    pub t_lb: f64,
    pub pass: bool,
    /// Product of the pairwise confidence factors (inhomogeneous branch).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<f64>,
}

/// Record of one model order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrailEntry {
    pub k: usize,
    pub rim_pvalues: Vec<(usize, usize, f64)>,
    /// `None` when the V-test rejected.
    pub glrt: Option<GlrtSummary>,
    pub phase: Option<PhaseOutcome>,
    pub p_hat: f64,
    pub w_bar: f64,
    pub p_ij: Vec<(usize, usize, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl TrailEntry {
    pub fn reliable(&self) -> bool {
        self.phase.is_some_and(|p| p.pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmosReport {
    pub k: usize,
    pub assignment: ClusterAssignment,
    pub termination: Termination,
    pub trail: Vec<TrailEntry>,
}

impl AmosReport {
    /// JSON form with keys `k`, `labels`, `termination` and `trail`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "labels": self.assignment.labels(),
            "termination": self.termination,
            "trail": self.trail,
        })
    }
}

fn pair_list(est: &RimEstimates) -> Vec<(usize, usize, f64)> {
    est.pairs().collect()
}

/// Runs the selection loop on a connected graph.
pub fn amos_cluster(g: &Graph, opts: &AmosOptions) -> Result<AmosReport> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no nodes".into()));
    }
    let components = g.connected_components().len();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    let k_max = opts.resolved_k_max(n);
    if k_max < 2 {
        return Ok(AmosReport {
            k: 1,
            assignment: ClusterAssignment::single(n)?,
            termination: Termination::KmaxReached,
            trail: Vec::new(),
        });
    }

    let working = g.normalized_input(opts.normalize)?;
    let spectral = SpectralOptions {
        normalize: NormalizeMode::None,
        row_normalize: opts.row_normalize,
        eigen: opts.eigen,
        kmeans: KMeansOptions::default(),
    };
    let mut trail = Vec::new();
    let mut last = None;
    for k in 2..=k_max {
        let seed = derive_seed(opts.seed, &[k as u64]);
        let (assignment, _) = cluster_working(&working, k, &spectral, seed)?;
        let ic = extract_interconnections(&working, &assignment)?;
        let vtest = rim_test(&ic.blocks, opts.eta);
        let rim_pvalues = vtest.pairs.iter().map(|p| (p.i, p.j, p.p_value)).collect();
        let mut flags: Vec<String> = vtest
            .pairs
            .iter()
            .filter(|p| p.untestable)
            .map(|p| format!("untestable pair ({}, {})", p.i, p.j))
            .collect();

        let entry = if vtest.rejected {
            let est = estimate_rates(&working, &assignment, &ic);
            if est.w_bar_defaulted {
                flags.push("no between-cluster edges; w_bar set to 1".into());
            }
            TrailEntry {
                k,
                rim_pvalues,
                glrt: None,
                phase: None,
                p_hat: est.p_hat,
                w_bar: est.w_bar,
                p_ij: pair_list(&est),
                flags,
            }
        } else {
            let eigen = EigenOptions {
                seed: derive_seed(seed, &[2]),
                ..opts.eigen
            };
            let est = estimate_rim(&working, &assignment, &ic, &eigen)?;
            if est.w_bar_defaulted {
                flags.push("no between-cluster edges; w_bar set to 1".into());
            }
            flags.extend(
                est.disconnected_clusters
                    .iter()
                    .map(|c| format!("cluster {c} induces a disconnected subgraph")),
            );
            let glrt = glrt_homogeneity_check(&est, opts.alpha);
            let phase = if glrt.pass {
                PhaseOutcome {
                    branch: PhaseBranch::Homogeneous,
                    t_hat: est.t_hat(),
                    t_lb: est.t_lb,
                    pass: est.t_hat() < est.t_lb,
                    product: None,
                }
            } else {
                let test = inhomogeneous_phase_test(&est, est.t_lb / est.w_bar, opts.alpha_prime);
                PhaseOutcome {
                    branch: PhaseBranch::Inhomogeneous,
                    t_hat: est.t_hat(),
                    t_lb: est.t_lb,
                    pass: test.pass,
                    product: Some(test.product),
                }
            };
            TrailEntry {
                k,
                rim_pvalues,
                glrt: Some(GlrtSummary {
                    statistic: glrt.statistic,
                    pass: glrt.pass,
                }),
                phase: Some(phase),
                p_hat: est.p_hat,
                w_bar: est.w_bar,
                p_ij: pair_list(&est),
                flags,
            }
        };
        let reliable = entry.reliable();
        trail.push(entry);
        if reliable {
            return Ok(AmosReport {
                k,
                assignment,
                termination: Termination::Reliable,
                trail,
            });
        }
        last = Some((k, assignment));
    }
    let (k, assignment) = last.expect("k_max >= 2");
    Ok(AmosReport {
        k,
        assignment,
        termination: Termination::KmaxReached,
        trail,
    })
}
