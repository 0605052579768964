use serde::Serialize;

use super::estimates::RimEstimates;
use super::special::chi_square_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlrtResult {
    pub statistic: f64,
    /// `C(K, 2) - 1`.
    pub dof: usize,
    /// Acceptance interval `[xi_{dof, 1 - alpha/2}, xi_{dof, alpha/2}]`;
    /// `None` when `dof = 0`.
    pub interval: Option<(f64, f64)>,
    pub pass: bool,
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Likelihood-ratio statistic of pairwise rates against one pooled rate.
pub fn glrt_statistic(est: &RimEstimates) -> f64 {
    let mut pairwise = 0.0;
    for (i, j, p) in est.pairs() {
        if p > 0.0 && p < 1.0 {
            let pairs = est.sizes[i] as f64 * est.sizes[j] as f64;
            let m = est.m_ij[i][j] as f64;
            pairwise += m * p.ln() + (pairs - m) * (1.0 - p).ln();
        }
    }
    let inter = (est.m - est.intra_edges.iter().sum::<usize>()) as f64;
    let total_pairs =
        (est.n as f64).powi(2) - est.sizes.iter().map(|&s| (s as f64).powi(2)).sum::<f64>();
    2.0 * pairwise - 2.0 * xlny(inter, est.p_hat) - xlny(total_pairs - 2.0 * inter, 1.0 - est.p_hat)
}

/// Two-sided chi-square interval check at level `alpha`.
///
/// With `K = 2` there is a single rate, `dof = 0`, and the check passes.
pub fn glrt_homogeneity_check(est: &RimEstimates, alpha: f64) -> GlrtResult {
    let statistic = glrt_statistic(est);
    let dof = (est.k * (est.k - 1) / 2).saturating_sub(1);
    if dof == 0 {
        return GlrtResult {
            statistic,
            dof,
            interval: None,
            pass: true,
        };
    }
    let lower = chi_square_quantile(dof as u64, 1.0 - alpha / 2.0);
    let upper = chi_square_quantile(dof as u64, alpha / 2.0);
    GlrtResult {
        statistic,
        dof,
        interval: Some((lower, upper)),
        pass: lower <= statistic && statistic <= upper,
    }
}
