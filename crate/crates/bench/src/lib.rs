//! Shared fixtures for the kernel benchmarks.

use hsmimo::SystemConfig;

/// The reference scenario with `N` repetitions and `N_R` receive antennas.
pub fn scenario(n_rep: usize, n_rx: usize) -> SystemConfig {
    SystemConfig { n_rep, n_rx, ..SystemConfig::default() }
}
