//! Power sums, h-statistics and unbiased variances of covariance estimators.

mod bivariate;
mod classical;
mod compensated;
mod quadrivariate;
mod sums;
mod univariate;
pub mod ustat;

pub use bivariate::{
    bivariate_ansatz_coeffs, h11, var_h11_analytic, var_h11_ansatz, var_h11_unbiased,
    CentralMoments2,
};
pub(crate) use bivariate::var_h11_numerator;
pub use classical::classical_level_bound;
pub use compensated::Compensated;
pub use quadrivariate::{
    quadrivariate_ansatz_coeffs, quadrivariate_ansatz_terms, var_zl_analytic, var_zl_ansatz,
    var_zl_unbiased, z_l, CentralMoments4,
};
pub use sums::{
    accumulate2, merge1, merge2, merge4, PowerSumSet, PowerSums1, PowerSums2, PowerSums4, IDX2,
    IDX4,
};
pub use univariate::{biased_fourth_central, h2, h4, polyache22, var_h2_plugin};
pub use ustat::central_product;
