use super::config::{CostModel, EstimatorKind};
use crate::mlmc::{ScreeningFit, SymCovMatrix};
use serde::Serialize;

/// Screening quantities of one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreeningLevel {
    pub l: usize,
    pub elements: usize,
    pub h: f64,
    pub samples: usize,
    /// `max |vech Z_l|`
    pub max_abs_z: f64,
    /// `max vech V_{l,1,1}` of the h-statistic estimator.
    pub max_v: f64,
    /// `max vech V_{l,cov}` of the classical bound.
    pub max_v_classical: f64,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreeningReport {
    pub run_seed: u64,
    pub e0: usize,
    pub finest_level: usize,
    pub samples: usize,
    pub cost_model: CostModel,
    pub levels: Vec<ScreeningLevel>,
    /// Fitted rates, absent when the data are degenerate.
    pub fit: Option<ScreeningFit>,
    /// Why no fit is reported.
    pub diagnostic: Option<String>,
    /// `max vech V_{1,1}` of single-level Monte Carlo on the finest mesh.
    pub max_v_mc: f64,
}

/// Per-level summary of an estimator run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateLevel {
    pub l: usize,
    pub n: usize,
    pub cost_per_sample: f64,
    pub max_abs_z: f64,
    /// `max vech` of the variance constant driving this estimator.
    pub max_v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub estimator: EstimatorKind,
    pub eps2_half: f64,
    pub cost_model: CostModel,
    pub run_seed: u64,
    pub levels: Vec<EstimateLevel>,
    pub total_cost: f64,
    /// `max_e sum_l V_l(e) / N_l` with the final variance estimates.
    pub achieved_error: f64,
    pub target_met: bool,
    /// Allocation rounds, the first included.
    pub rounds: usize,
    pub nodes: Vec<f64>,
    /// Final covariance estimate; multilevel kinds are PSD-repaired.
    pub covariance: SymCovMatrix,
    pub min_eigenvalue_raw: f64,
    pub min_eigenvalue: f64,
    /// `sqrt(max(0, sum_l V_l(e) / N_l))` per entry.
    pub standard_error_vech: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sampling variance of the mean estimate per node.
    pub mean_error: Vec<f64>,
    pub variance: Vec<f64>,
    /// Sampling variance of the variance estimate per node.
    pub variance_error: Vec<f64>,
    pub center_node: usize,
    pub center_mean: f64,
}

impl EstimatorReport {
    pub fn sample_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.n).collect()
    }
}

/// One accuracy target of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub eps2_half: f64,
    pub n_hstat: Vec<usize>,
    pub n_classical: Vec<usize>,
    pub n_mc: usize,
    pub cost_hstat: f64,
    pub cost_classical: f64,
    pub cost_mc: f64,
    pub achieved_hstat: f64,
    pub achieved_classical: f64,
    pub achieved_mc: f64,
    pub speedup_hstat_vs_mc: f64,
    pub speedup_classical_vs_mc: f64,
    pub speedup_hstat_vs_classical: f64,
    /// `||C_mlmc - C_mc||_F / ||C_mc||_F`
    pub rel_diff_cov_hstat: f64,
    pub rel_diff_cov_classical: f64,
    /// `||v_mlmc - v_mc||_2 / ||v_mc||_2` of the pointwise variances.
    pub rel_diff_var_hstat: f64,
    pub rel_diff_var_classical: f64,
    /// `max_k |m_mlmc - m_mc| / |m_mc|` of the pointwise means.
    pub rel_diff_mean_hstat: f64,
    pub center_mean_hstat: f64,
    pub center_mean_mc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub run_seed: u64,
    pub cost_model: CostModel,
    pub rows: Vec<CompareRow>,
}
