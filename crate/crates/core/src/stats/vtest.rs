use serde::Serialize;

use super::special::std_normal_cdf;
use crate::partition::InterconnectionMatrix;

/// V-test outcome for one cluster pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTest {
    pub i: usize,
    pub j: usize,
    pub z: f64,
    pub p_value: f64,
    /// Fewer than two columns: no homogeneity evidence, counted as a pass.
    pub untestable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VTestReport {
    pub pairs: Vec<PairTest>,
    pub eta: f64,
    pub rejected: bool,
}

impl VTestReport {
    pub fn passed(&self) -> bool {
        !self.rejected
    }

    pub fn min_p_value(&self) -> f64 {
        self.pairs.iter().map(|p| p.p_value).fold(1.0, f64::min)
    }
}

/// Row-sum homogeneity statistic `Z` and its two-sided p-value.
///
/// Entries are binarized. Returns `None` when the block has fewer than two
/// columns (then `N = 0`).
pub fn vtest_pvalue(c: &InterconnectionMatrix) -> Option<(f64, f64)> {
    let (rows, cols) = (c.rows(), c.cols());
    if cols < 2 || rows == 0 {
        return None;
    }
    let nj = cols as f64;
    let (mut big_x, mut big_y) = (0.0, 0.0);
    for x in c.row_counts() {
        let x = x as f64;
        let y = nj - x;
        big_x += x * x - x;
        big_y += y * y - y;
    }
    let big_n = rows as f64 * nj * (nj - 1.0);
    let v = big_x + big_y + 2.0 * (big_x * big_y).sqrt();
    let z = (v - big_n) / (2.0 * big_n).sqrt();
    let p = 2.0 * std_normal_cdf(z).min(std_normal_cdf(-z));
    Some((z, p.min(1.0)))
}

/// Runs the V-test on every block; rejects if any p-value is `<= eta`.
pub fn rim_test(blocks: &[InterconnectionMatrix], eta: f64) -> VTestReport {
    let pairs: Vec<PairTest> = blocks
        .iter()
        .map(|c| match vtest_pvalue(c) {
            Some((z, p_value)) => PairTest {
                i: c.i,
                j: c.j,
                z,
                p_value,
                untestable: false,
            },
            None => PairTest {
                i: c.i,
                j: c.j,
                z: 0.0,
                p_value: 1.0,
                untestable: true,
            },
        })
        .collect();
    let rejected = pairs.iter().any(|p| !p.untestable && p.p_value <= eta);
    VTestReport {
        pairs,
        eta,
        rejected,
    }
}
