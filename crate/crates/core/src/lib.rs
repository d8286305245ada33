//! Unbiased Monte Carlo and multilevel Monte Carlo covariance estimation
//! built on h-statistics, with a 1D stochastic heat-equation model.
//!
//! The crate is organised bottom up:
//!
//! - [`moments`]: mergeable power-sum accumulators, h-statistics and the
//!   closed-form unbiased variances of the covariance estimators.
//! - [`mlmc`]: telescoping, sample allocation, cost model, rate fitting,
//!   PSD repair and half-vectorization.
//! - [`model`]: the heat equation, nested meshes, coupled sampling and the
//!   bulk per-entry accumulators.
//! - [`oracle`]: exact enumeration and replication used to certify
//!   unbiasedness.
//! - [`experiment`]: run configuration and the screening, estimation and
//!   comparison workflows with their reports.

pub mod error;
pub mod experiment;
pub mod mlmc;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
pub use experiment::{
    CompareReport, CostModel, EstimatorKind, EstimatorReport, RunConfig, ScreeningReport,
};
pub use mlmc::{LevelStats, Regime, ScreeningFit, SymCovMatrix};
pub use model::{HeatProblem, LevelSamplePair, MeshHierarchy};
pub use moments::{CentralMoments2, CentralMoments4, PowerSums1, PowerSums2, PowerSums4};
pub use oracle::DiscreteDistribution;
