//! Shared fixtures for the benchmarks.

use avi_core::{random_avi, AviProblem, GenSpec};

/// A benchmark instance of the standard shape: `m = 10n`, `γ = 0.5`.
pub fn instance(n: usize, seed: u64) -> AviProblem {
    random_avi(&GenSpec::new(n, 10 * n, 0.5, seed)).expect("γ < 1 instances are strongly monotone")
}
