//! Steady 1D stochastic heat equation with a lognormal conductivity.

mod field;
mod mesh;
mod problem;
mod sample;
mod solve;

pub use field::{
    generate_level_accumulators, reference_shift, EntrySet, LevelField, LevelSummary, BLOCK, SHARD,
};
pub use mesh::{build_hierarchy, interpolate_to_finest, MeshHierarchy, MeshLevel};
pub use problem::{HeatProblem, KappaParam};
pub use sample::{coupled_sample, sample_kappa, LevelSamplePair, SampleSeed};
pub use solve::solve_heat;
