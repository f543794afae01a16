//! Shared fixtures for the integration suites: the seeded benchmark
//! pipeline is computed once per test binary and reused.

use std::sync::OnceLock;

use vecstab::lyap::{analyze_subsystem, LyapunovFunction};
use vecstab::network::{vdp_benchmark, Network};

pub const SEED: u64 = 42;

/// Benchmark network with its per-subsystem normalized Lyapunov functions.
pub fn pipeline() -> &'static (Network, Vec<LyapunovFunction>) {
    static PIPE: OnceLock<(Network, Vec<LyapunovFunction>)> = OnceLock::new();
    PIPE.get_or_init(|| {
        let net = vdp_benchmark(SEED);
        let lyap = net
            .subsystems()
            .iter()
            .map(|s| analyze_subsystem(s).expect("benchmark subsystems certify").lyapunov)
            .collect();
        (net, lyap)
    })
}

/// Euclidean norm of a state vector.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}
