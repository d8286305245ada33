//! Ground truth for unbiasedness claims: exact enumeration over discrete
//! distributions and replicated expectations for continuous models.

mod certify;
mod distribution;

pub use certify::{
    central_moments2, central_moments4, certify, rel_close, Check, Estimators, CERTIFY_TOLERANCE,
};
pub use distribution::{
    bivariate_fixture, exact_central_moment, exact_expectation, quadrivariate_fixture,
    replicated_expectation, two_point_fixture, DiscreteDistribution, Replication,
    ENUMERATION_CAP,
};
