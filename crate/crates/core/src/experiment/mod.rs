//! Configuration and the screening, estimation and comparison workflows of
//! the heat-equation study.

mod config;
mod report;
mod workflow;

pub use config::{parse_list, CostModel, EstimatorKind, RunConfig};
pub use report::{
    CompareReport, CompareRow, EstimateLevel, EstimatorReport, ScreeningLevel, ScreeningReport,
};
pub use workflow::{
    compare_row, hierarchy, level_costs, max_relative_difference, measure_cost, relative_difference,
    run_compare, run_estimate, run_screening, Screening,
};
