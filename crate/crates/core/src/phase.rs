//! Phase-transition experiments and the theory-side quantities that go with
//! them: detectability, threshold bounds from per-cluster spectra, the
//! breakdown matrix, principal angles between embeddings, eigenvalue
//! sandwich checks and a seeded sweep harness.

use nalgebra::{Complex, DMatrix};
use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use rayon::prelude::*;

use crate::amos::{amos_cluster, AmosOptions};
use crate::eigen::{smallest_eigenpairs, smallest_eigenpairs_any, EigenOptions};
use crate::error::{Error, PartitionError, Result};
use crate::generators::{generate_rim, RimSpec, WeightLaw};
use crate::graph::{Graph, NormalizeMode};
use crate::partition::ClusterAssignment;
use crate::rng::derive_seed;
use crate::spectral::{cluster_at_k, SpectralOptions};

/// Fraction of nodes matched under the best bijection between found and
/// true clusters. When the cluster counts differ the confusion matrix is
/// padded with zeros, so unmatched clusters contribute nothing.
pub fn detectability(
    found: &ClusterAssignment,
    truth: &ClusterAssignment,
) -> Result<f64, PartitionError> {
    truth.check_len(found.len())?;
    let size = found.k().max(truth.k());
    let mut confusion = Matrix::new(size, size, 0i64);
    for (&f, &t) in found.labels().iter().zip(truth.labels()) {
        confusion[(f, t)] += 1;
    }
    let (matched, _) = kuhn_munkres(&confusion);
    Ok(matched as f64 / found.len() as f64)
}

/// Finite-n threshold bounds from the per-cluster Laplacians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBounds {
    pub k: usize,
    /// `min_k S_{2:K}(L_k) / ((K - 1) n_max)`.
    pub lower: f64,
    /// `min_k S_{2:K}(L_k) / ((K - 1) n_min)`.
    pub upper: f64,
    pub min_partial_sum: f64,
    /// `min_k lambda_2(L_k) / n_max`.
    pub lambda2_lower: f64,
    /// `min_k lambda_K(L_k) / n_min`.
    pub lambda_k_upper: f64,
    pub n_max: usize,
    pub n_min: usize,
    /// Bounds are on the rate `p * w_bar` rather than on `p`.
    pub weighted: bool,
    pub cluster_partial_sums: Vec<f64>,
}

/// Threshold bounds from the true clusters of `g`. Every cluster must induce
/// a connected subgraph.
pub fn phase_bounds(g: &Graph, truth: &ClusterAssignment, k: usize) -> Result<PhaseBounds> {
    truth.check_len(g.node_count())?;
    if k < 2 {
        return Err(Error::InvalidArgument(format!("model order K = {k} must be at least 2")));
    }
    let members = truth.members();
    let mut sums = Vec::with_capacity(members.len());
    let mut lambda2 = f64::INFINITY;
    let mut lambda_k = f64::INFINITY;
    for (idx, nodes) in members.iter().enumerate() {
        if nodes.len() < 2 {
            sums.push(0.0);
            lambda2 = 0.0;
            lambda_k = 0.0;
            continue;
        }
        let sub = g.induced_subgraph(nodes);
        let opts = EigenOptions {
            next_eigenvalue: false,
            ..EigenOptions::with_seed(derive_seed(0xb0, &[idx as u64]))
        };
        let emb = smallest_eigenpairs_any(&sub.laplacian(), k.min(nodes.len()), &opts)?;
        if emb.disconnected {
            return Err(Error::DisconnectedCluster { cluster: idx });
        }
        sums.push(emb.partial_sum());
        lambda2 = lambda2.min(emb.eigenvalues[0]);
        lambda_k = lambda_k.min(*emb.eigenvalues.last().expect("K >= 2"));
    }
    let n_max = *truth.sizes().iter().max().expect("nonempty");
    let n_min = *truth.sizes().iter().min().expect("nonempty");
    let min_s = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let km1 = (k - 1) as f64;
    Ok(PhaseBounds {
        k,
        lower: min_s / (km1 * n_max as f64),
        upper: min_s / (km1 * n_min as f64),
        min_partial_sum: min_s,
        lambda2_lower: lambda2 / n_max as f64,
        lambda_k_upper: lambda_k / n_min as f64,
        n_max,
        n_min,
        weighted: g.is_weighted(),
        cluster_partial_sums: sums,
    })
}

/// Large-n bounds for Erdos-Renyi clusters with internal densities `p_k`:
/// `(min_k n_k p_k / n_max, min_k n_k p_k / n_min)`.
pub fn sbm_bounds(sizes: &[usize], p_intra: &[f64]) -> (f64, f64) {
    let m = sizes
        .iter()
        .zip(p_intra)
        .map(|(&n, &p)| n as f64 * p)
        .fold(f64::INFINITY, f64::min);
    let n_max = *sizes.iter().max().unwrap_or(&1) as f64;
    let n_min = *sizes.iter().min().unwrap_or(&1) as f64;
    (m / n_max, m / n_min)
}

/// The `(K-1) x (K-1)` matrix of interconnection parameters whose spectrum
/// is compared against the Laplacian's.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownMatrix {
    pub a: DMatrix<f64>,
    pub n: usize,
    /// Eigenvalues of `a`, which need not be symmetric.
    pub eigenvalues: Vec<Complex<f64>>,
}

impl BreakdownMatrix {
    /// `a / n`.
    pub fn scaled(&self) -> DMatrix<f64> {
        &self.a / self.n as f64
    }

    /// `min_{i,j} |lambda_i(a) / n - lambda_j(L) / n|` over the given
    /// Laplacian eigenvalues (normally `lambda_2..lambda_K`).
    pub fn margin(&self, laplacian_eigenvalues: &[f64]) -> f64 {
        let n = self.n as f64;
        let mut best = f64::INFINITY;
        for mu in &self.eigenvalues {
            for &l in laplacian_eigenvalues {
                best = best.min((mu / n - Complex::new(l / n, 0.0)).norm());
            }
        }
        best
    }
}

pub fn breakdown_matrix(p: &[Vec<f64>], sizes: &[usize]) -> Result<BreakdownMatrix> {
    let k = sizes.len();
    if k < 2 || p.len() != k || p.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidArgument(format!(
            "need a K x K probability matrix and K >= 2 sizes, got {} sizes",
            k
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidArgument("cluster sizes must be positive".into()));
    }
    let last = k - 1;
    let nf = |i: usize| sizes[i] as f64;
    let a = DMatrix::from_fn(last, last, |i, j| {
        if i == j {
            let rest: f64 = (0..last).filter(|&z| z != i).map(|z| nf(z) * p[i][z]).sum();
            (nf(i) + nf(last)) * p[i][last] + rest
        } else {
            nf(i) * (p[i][last] - p[i][j])
        }
    });
    let eigenvalues = a.clone().complex_eigenvalues().iter().copied().collect();
    Ok(BreakdownMatrix {
        a,
        n: sizes.iter().sum(),
        eigenvalues,
    })
}

/// Optional inputs for the distance bound `b / delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleReference {
    pub p: f64,
    /// `lambda_{K+1}(L) / n`.
    pub lambda_next_over_n: f64,
    /// `||L - L~||_F / n`.
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngleResult {
    /// Singular values of `Y^T Y~`, descending, clamped to `[0, 1]`.
    pub cosines: Vec<f64>,
    pub angles: Vec<f64>,
    /// `||sin Theta(Y, Y~)||_F`.
    pub sin_theta: f64,
    pub b: Option<f64>,
    pub delta: Option<f64>,
    /// `b / delta`; `None` without a reference or when `delta <= 0`.
    pub bound: Option<f64>,
    pub delta_nonpositive: bool,
}

fn gram_deviation(y: &DMatrix<f64>) -> f64 {
    let gram = y.transpose() * y;
    let id = DMatrix::<f64>::identity(gram.nrows(), gram.ncols());
    (gram - id).amax()
}

/// Principal angles between the column spaces of two orthonormal
/// `n x (K-1)` matrices.
///
/// The Frobenius norm of the sines is taken from the residual
/// `||Y~ - Y (Y^T Y~)||_F`, which keeps small angles accurate where
/// `sqrt(1 - sigma^2)` would lose them to cancellation.
pub fn principal_angles(
    y: &DMatrix<f64>,
    y_tilde: &DMatrix<f64>,
    reference: Option<AngleReference>,
) -> Result<PrincipalAngleResult> {
    if y.shape() != y_tilde.shape() || y.ncols() == 0 {
        return Err(Error::InvalidArgument(format!(
            "embeddings must share a nonempty shape, got {:?} and {:?}",
            y.shape(),
            y_tilde.shape()
        )));
    }
    let deviation = gram_deviation(y).max(gram_deviation(y_tilde));
    if deviation > 1e-6 {
        return Err(Error::NotOrthonormal { deviation });
    }
    let cross = y.transpose() * y_tilde;
    let mut cosines: Vec<f64> = cross
        .clone()
        .singular_values()
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    let angles = cosines.iter().map(|c| c.acos()).collect();
    let sin_theta = (y_tilde - y * cross).norm().min((y.ncols() as f64).sqrt());

    let (b, delta, bound, delta_nonpositive) = match reference {
        Some(r) => {
            let delta = r.p.min((r.lambda_next_over_n - r.p).abs());
            let ok = delta > 0.0;
            (Some(r.b), Some(delta), ok.then(|| r.b / delta), !ok)
        }
        None => (None, None, None, false),
    };
    Ok(PrincipalAngleResult {
        cosines,
        angles,
        sin_theta,
        b,
        delta,
        bound,
        delta_nonpositive,
    })
}

/// Outcome of the `p_min <= lambda_j(L) / n <= p_max` sandwich.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueBoundsCheck {
    pub p_min: f64,
    pub p_max: f64,
    /// Three binomial standard deviations at the pair attaining `p_min`.
    pub slack_low: f64,
    /// Three binomial standard deviations at the pair attaining `p_max`.
    pub slack_high: f64,
    /// `lambda_2 / n .. lambda_K / n`.
    pub eigenvalues_over_n: Vec<f64>,
    pub threshold: f64,
    /// `p_max` was below the lower threshold bound.
    pub precondition: bool,
    /// `None` when the precondition failed and the check was skipped.
    pub pass: Option<bool>,
}

/// Checks the smallest `K - 1` nonzero eigenvalues of `L / n` against the
/// pairwise interconnection probabilities of `spec`, with a `3 sigma` band.
pub fn eigenvalue_bounds_check(
    g: &Graph,
    truth: &ClusterAssignment,
    spec: &RimSpec,
    seed: u64,
) -> Result<EigenvalueBoundsCheck> {
    let k = spec.k();
    if truth.k() != k {
        return Err(Error::InvalidArgument(format!(
            "truth has {} clusters, spec has {k}",
            truth.k()
        )));
    }
    let sizes = truth.sizes();
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    for i in 0..k {
        for j in i + 1..k {
            let p = spec.p(i, j);
            let slack = 3.0 * (p * (1.0 - p) / (sizes[i] as f64 * sizes[j] as f64)).sqrt();
            if p < lo.0 {
                lo = (p, slack);
            }
            if p > hi.0 {
                hi = (p, slack);
            }
        }
    }
    let bounds = phase_bounds(g, truth, k)?;
    let precondition = hi.0 < bounds.lower;
    let n = g.node_count() as f64;
    let opts = EigenOptions {
        next_eigenvalue: false,
        ..EigenOptions::with_seed(seed)
    };
    let emb = smallest_eigenpairs(&g.laplacian(), k, &opts)?;
    let eigenvalues_over_n: Vec<f64> = emb.eigenvalues.iter().map(|l| l / n).collect();
    let pass = precondition.then(|| {
        eigenvalues_over_n
            .iter()
            .all(|&l| l >= lo.0 - lo.1 && l <= hi.0 + hi.1)
    });
    Ok(EigenvalueBoundsCheck {
        p_min: lo.0,
        p_max: hi.0,
        slack_low: lo.1,
        slack_high: hi.1,
        eigenvalues_over_n,
        threshold: bounds.lower,
        precondition,
        pass,
    })
}

/// Cluster-wise structure of the embedding rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Separability {
    /// Largest distance of a row from its cluster's mean row.
    pub within_spread: f64,
    /// Smallest distance between two cluster mean rows.
    pub between_distance: f64,
    /// `within_spread / between_distance`.
    pub ratio: f64,
    /// Norm of each cluster's mean row of `sqrt(n) Y`.
    pub centroid_norms: Vec<f64>,
    /// Root-mean-square row norm of `sqrt(n) Y`, which is `sqrt(K - 1)`
    /// for orthonormal columns.
    pub row_rms: f64,
    /// Largest `|sum_k n_k mean_k| / n` over the columns of `sqrt(n) Y`.
    pub weighted_sum: f64,
    /// Every column has clusters of both signs.
    pub mixed_signs: bool,
}

pub fn separability_check(y: &DMatrix<f64>, truth: &ClusterAssignment) -> Result<Separability> {
    truth.check_len(y.nrows())?;
    let (n, d) = y.shape();
    let k = truth.k();
    let scale = (n as f64).sqrt();
    let mut means = DMatrix::<f64>::zeros(k, d);
    for (i, &c) in truth.labels().iter().enumerate() {
        for col in 0..d {
            means[(c, col)] += y[(i, col)] * scale;
        }
    }
    for (c, &size) in truth.sizes().iter().enumerate() {
        for col in 0..d {
            means[(c, col)] /= size as f64;
        }
    }
    let mut within: f64 = 0.0;
    let mut sq_total = 0.0;
    for (i, &c) in truth.labels().iter().enumerate() {
        let row = y.row(i) * scale;
        within = within.max((row - means.row(c)).norm());
        sq_total += y.row(i).norm_squared() * n as f64;
    }
    let mut between = f64::INFINITY;
    for a in 0..k {
        for b in a + 1..k {
            between = between.min((means.row(a) - means.row(b)).norm());
        }
    }
    let centroid_norms = (0..k).map(|c| means.row(c).norm()).collect();
    let sizes = truth.sizes();
    let mut weighted_sum: f64 = 0.0;
    let mut mixed_signs = true;
    for col in 0..d {
        let s: f64 = (0..k).map(|c| sizes[c] as f64 * means[(c, col)]).sum();
        weighted_sum = weighted_sum.max(s.abs() / n as f64);
        let pos = (0..k).any(|c| means[(c, col)] > 0.0);
        let neg = (0..k).any(|c| means[(c, col)] < 0.0);
        mixed_signs &= pos && neg;
    }
    Ok(Separability {
        within_spread: within,
        between_distance: between,
        ratio: within / between,
        centroid_norms,
        row_rms: (sq_total / n as f64).sqrt(),
        weighted_sum,
        mixed_signs,
    })
}

/// Whether sweep grid values are interconnection probabilities or rates
/// `t = p * w_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    P,
    T,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            Self::P => "p",
            Self::T => "t",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub spec: RimSpec,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub axis: SweepAxis,
    /// Run the full selection loop on every cell as well.
    pub with_amos: bool,
}

impl SweepConfig {
    /// Rate axis for weighted specs, probability axis otherwise.
    pub fn new(spec: RimSpec, grid: Vec<f64>, trials: usize, seed: u64) -> Self {
        let axis = if spec.weights == WeightLaw::Unit {
            SweepAxis::P
        } else {
            SweepAxis::T
        };
        Self {
            spec,
            grid,
            trials,
            seed,
            axis,
            with_amos: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        for &x in &self.grid {
            let ok = match self.axis {
                SweepAxis::P => (0.0..=1.0).contains(&x),
                SweepAxis::T => x > 0.0 && x / self.spec.mean_weight() <= 1.0,
            };
            if !ok || !x.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "grid value {x} is outside the valid range for a {}-sweep",
                    self.axis.column()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Grid value (`p` or `t`).
    pub x: f64,
    pub grid_index: usize,
    pub trial: usize,
    pub s2k_over_n: f64,
    pub detectability: f64,
    pub k_detected: Option<usize>,
    pub error: Option<String>,
}

fn sweep_cell(cfg: &SweepConfig, gi: usize, trial: usize) -> SweepRecord {
    let x = cfg.grid[gi];
    let cell_seed = derive_seed(cfg.seed, &[gi as u64, trial as u64]);
    let p = match cfg.axis {
        SweepAxis::P => x,
        SweepAxis::T => x / cfg.spec.mean_weight(),
    };
    let run = || -> Result<(f64, f64, Option<usize>)> {
        let spec = cfg.spec.with_homogeneous(p);
        let (g, truth) = generate_rim(&spec, derive_seed(cell_seed, &[0]))?;
        let k = spec.k();
        let opts = SpectralOptions::with_normalize(NormalizeMode::None);
        let (found, emb) = cluster_at_k(&g, k, &opts, derive_seed(cell_seed, &[1]))?;
        let det = detectability(&found, &truth)?;
        let k_detected = if cfg.with_amos {
            let report = amos_cluster(&g, &AmosOptions::with_seed(derive_seed(cell_seed, &[2])))?;
            Some(report.k)
        } else {
            None
        };
        Ok((emb.partial_sum() / g.node_count() as f64, det, k_detected))
    };
    match run() {
        Ok((s, det, k_detected)) => SweepRecord {
            x,
            grid_index: gi,
            trial,
            s2k_over_n: s,
            detectability: det,
            k_detected,
            error: None,
        },
        Err(e) => SweepRecord {
            x,
            grid_index: gi,
            trial,
            s2k_over_n: f64::NAN,
            detectability: f64::NAN,
            k_detected: None,
            error: Some(e.to_string()),
        },
    }
}

/// One record per grid point and trial, in grid-major order. Each cell
/// draws from its own seed stream, so the output does not depend on how
/// many threads run it. Failed cells carry NaN fields and an error message.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> = (0..cfg.grid.len())
        .flat_map(|gi| (0..cfg.trials).map(move |t| (gi, t)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(gi, t)| sweep_cell(cfg, gi, t))
        .collect())
}

/// CSV with header `p,trial,s2k_over_n,detectability,k_detected` (`t` for
/// rate sweeps). `k_detected` is empty unless the selection loop ran.
pub fn sweep_csv(records: &[SweepRecord], axis: SweepAxis) -> String {
    let mut out = format!("{},trial,s2k_over_n,detectability,k_detected\n", axis.column());
    for r in records {
        let k = match (r.k_detected, &r.error) {
            (Some(k), _) => k.to_string(),
            (None, Some(_)) => "nan".into(),
            (None, None) => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.x,
            r.trial,
            csv_float(r.s2k_over_n),
            csv_float(r.detectability),
            k
        ));
    }
    out
}

fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        x.to_string()
    }
}

/// Per-grid-point means of `s2k_over_n` and detectability, skipping failed
/// cells.
pub fn sweep_means(records: &[SweepRecord]) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64, usize)> = Vec::new();
    let mut last = usize::MAX;
    for r in records {
        if r.grid_index != last {
            out.push((r.x, 0.0, 0.0, 0));
            last = r.grid_index;
        }
        if r.error.is_none() {
            let e = out.last_mut().expect("pushed");
            e.1 += r.s2k_over_n;
            e.2 += r.detectability;
            e.3 += 1;
        }
    }
    out.into_iter()
        .map(|(x, s, d, c)| (x, s / c as f64, d / c as f64))
        .collect()
}

/// Ordinary least squares `(slope, intercept, residual sum of squares)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (slope, intercept, rss)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub index: usize,
    pub x: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    pub rss: f64,
}

/// Two-segment least-squares fit. Each interior grid point is tried as the
/// break, shared by both segments; the one with the smallest total
/// residual wins. Needs at least three points.
pub fn fit_breakpoint(xs: &[f64], ys: &[f64]) -> Option<Breakpoint> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    let mut best: Option<Breakpoint> = None;
    for b in 1..xs.len() - 1 {
        let (ls, _, lr) = linear_fit(&xs[..=b], &ys[..=b]);
        let (rs, _, rr) = linear_fit(&xs[b..], &ys[b..]);
        let rss = lr + rr;
        if best.is_none_or(|bp| rss < bp.rss) {
            best = Some(Breakpoint {
                index: b,
                x: xs[b],
                left_slope: ls,
                right_slope: rs,
                rss,
            });
        }
    }
    best
}
