//! Statistical tests for the random interconnection model.

mod estimates;
mod glrt;
pub mod special;
mod vtest;

pub use estimates::{estimate_rates, estimate_rim, partial_sum_for_cluster, RimEstimates};
pub use glrt::{glrt_homogeneity_check, GlrtResult};
pub use phase_test::{anscombe, inhomogeneous_phase_test, InhomogeneousTest};
pub use special::{chi_square_quantile, std_normal_cdf};
pub use vtest::{rim_test, vtest_pvalue, PairTest, VTestReport};
