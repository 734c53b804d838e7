//! Shared instance builders for the benchmark suite.

use gaudin_core::bethe::{solve_bethe, BetheRootSet, Kind, SolverConfig};
use gaudin_core::params::ModelParams;
use gaudin_core::C64;

/// The two-site reference instance used across the benchmarks.
pub fn desk() -> ModelParams {
    ModelParams::from_real(0.3, 0.7, 0.5, 0.2, 0.1, &[0.11, 0.23]).unwrap()
}

/// Generic chain of n sites (n even) with spread-out inhomogeneities.
pub fn chain(n: usize) -> ModelParams {
    let z: Vec<f64> = (0..n).map(|j| 0.11 + 0.13 * j as f64).collect();
    ModelParams::from_real(0.3, 0.7, 0.5, 0.2, 0.1, &z).unwrap()
}

/// Spectral-parameter list clear of the chain inhomogeneities.
pub fn spectral(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| C64::new(0.17 + 0.11 * j as f64, 0.05 + 0.01 * j as f64))
        .collect()
}

/// A converged kind-1 root set for the given chain.
pub fn on_shell_roots(params: &ModelParams) -> BetheRootSet {
    let cfg = SolverConfig {
        starts: 512,
        ..SolverConfig::default()
    };
    solve_bethe(Kind::One, params, &cfg)
        .sets
        .into_iter()
        .next()
        .expect("no converged roots for benchmark instance")
}
