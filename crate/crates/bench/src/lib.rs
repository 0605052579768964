//! Shared fixtures for the criterion benches.

use amos_core::generators::{generate_rim, ClusterKind, ClusterSpec, RimSpec};
use amos_core::{ClusterAssignment, Graph};

/// Three equal Erdos-Renyi clusters with expected degree about 20 inside a
/// cluster and 2 across, so `m` grows linearly with `n`.
pub fn sparse_sbm(n: usize, seed: u64) -> (Graph, ClusterAssignment) {
    let size = n / 3;
    let cluster = ClusterSpec {
        kind: ClusterKind::ErdosRenyi {
            p: (20.0 / size as f64).min(1.0),
        },
        size,
    };
    let spec = RimSpec::homogeneous(vec![cluster; 3], (1.0 / size as f64).min(1.0));
    generate_rim(&spec, seed).expect("valid spec")
}
