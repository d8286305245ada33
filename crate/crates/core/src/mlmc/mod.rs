//! Multilevel assembly: telescoping, sample allocation, costs, screening
//! rate fits, PSD repair and half-vectorization.

mod allocation;
mod psd;
mod rates;
mod telescope;
mod vech;

pub use allocation::{allocate_samples, mc_sample_count, sampling_error, total_cost, MIN_SAMPLES};
pub use psd::{min_eigenvalue, repair_psd};
pub use rates::{
    complexity_bound, fit_power_law, fit_rates, LevelScreen, Regime, ScreeningFit,
    REGIME_TOLERANCE,
};
pub use telescope::{
    deterministic_error_proxy, level_h2_difference, level_variance_constant, mlmc_mean,
    mlmc_variance_h2, telescope, LevelStats, LevelVariance,
};
pub use vech::{unvech, vech, vech_index, vech_len, vech_pairs, SymCovMatrix};
