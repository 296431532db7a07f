//! Shared fixtures for the criterion benches.

use measim_core::sterngerlach::{SgParams, SgVariant};

/// A small, fast Stern-Gerlach configuration for benchmarking single runs.
pub fn bench_params(variant: SgVariant, grid_n: usize) -> SgParams {
    SgParams {
        grid_n,
        ..SgParams::defaults_for(variant)
    }
}
