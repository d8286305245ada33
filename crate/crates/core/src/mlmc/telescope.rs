use super::vech::SymCovMatrix;
use crate::error::{require_samples, require_same_len, Error, Result};
use crate::moments::{h11, var_h11_numerator, PowerSums2};
use serde::{Deserialize, Serialize};

/// Per-level statistics of a covariance estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub l: usize,
    pub n_l: usize,
    /// Level contribution per half-vectorization entry.
    pub z_vech: Vec<f64>,
    /// Per-sample variance constant `N_l Var(Z_l)` per entry.
    pub v_vech: Vec<f64>,
    pub cost_per_sample: f64,
}

/// Entrywise sum of per-level contributions.
pub fn telescope(levels: &[Vec<f64>]) -> Result<SymCovMatrix> {
    let first = levels.first().ok_or_else(|| Error::domain("no levels to telescope"))?;
    let mut out = vec![0.0; first.len()];
    for v in levels {
        require_same_len(first.len(), v.len())?;
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    SymCovMatrix::from_vech(out)
}

/// `max |fine - coarse|` between consecutive-level estimates.
pub fn deterministic_error_proxy(fine: &[f64], coarse: &[f64]) -> Result<f64> {
    require_same_len(fine.len(), coarse.len())?;
    Ok(fine.iter().zip(coarse).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Multilevel mean: entrywise sum of the per-level sample means of `Y_l`.
pub fn mlmc_mean(level_means: &[Vec<f64>]) -> Result<Vec<f64>> {
    telescope_vectors(level_means)
}

fn telescope_vectors(levels: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = levels.first().ok_or_else(|| Error::domain("no levels to telescope"))?;
    let mut out = vec![0.0; first.len()];
    for v in levels {
        require_same_len(first.len(), v.len())?;
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    Ok(out)
}

/// Per-node quantities of one level of the multilevel variance estimator,
/// computed from power sums of `(X+, X-) = (fine + coarse, fine - coarse)`.
/// At the base level pass `X+ = X- = u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelVariance {
    pub n: usize,
    /// `h2(fine) - h2(coarse)` per node.
    pub dh2: Vec<f64>,
    /// Per-sample variance constant `V_{l,2}` per node.
    pub v2: Vec<f64>,
}

/// `h2(fine) - h2(coarse)`, which equals `h11(X+, X-)`.
pub fn level_h2_difference(ps: &PowerSums2) -> Result<f64> {
    h11(ps)
}

/// Unbiased per-sample variance constant `N Var(h2(fine) - h2(coarse))`.
pub fn level_variance_constant(ps: &PowerSums2) -> Result<f64> {
    require_samples("level variance constant", ps.n(), 4)?;
    let n = ps.n() as f64;
    Ok(var_h11_numerator(ps) / ((n - 3.0) * (n - 2.0) * (n - 1.0).powi(2) * n))
}

impl LevelVariance {
    pub fn from_sums(sums: &[PowerSums2]) -> Result<Self> {
        let n = sums.first().map_or(0, |p| p.n());
        let mut dh2 = Vec::with_capacity(sums.len());
        let mut v2 = Vec::with_capacity(sums.len());
        for ps in sums {
            require_same_len(n, ps.n())?;
            dh2.push(level_h2_difference(ps)?);
            v2.push(level_variance_constant(ps)?);
        }
        Ok(LevelVariance { n, dh2, v2 })
    }
}

/// Multilevel variance estimate and its sampling error `sum_l V_{l,2}/N_l`.
pub fn mlmc_variance_h2(levels: &[LevelVariance]) -> Result<(Vec<f64>, Vec<f64>)> {
    let first = levels.first().ok_or_else(|| Error::domain("no levels"))?;
    let mut est = vec![0.0; first.dh2.len()];
    let mut err = vec![0.0; first.dh2.len()];
    for lv in levels {
        require_samples("mlmc_variance_h2", lv.n, 4)?;
        require_same_len(est.len(), lv.dh2.len())?;
        require_same_len(est.len(), lv.v2.len())?;
        for k in 0..est.len() {
            est[k] += lv.dh2[k];
            err[k] += lv.v2[k] / lv.n as f64;
        }
    }
    Ok((est, err))
}
