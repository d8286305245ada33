use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance on `|beta - gamma|` below which the rates count as equal.
pub const REGIME_TOLERANCE: f64 = 0.1;

/// Screening quantities of one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelScreen {
    pub l: usize,
    pub h: f64,
    /// `max |vech Z_l|`
    pub max_abs_z: f64,
    /// `max vech V_l` of the h-statistic estimator.
    pub max_v: f64,
    /// `max vech V_l` of the classical bound.
    pub max_v_classical: f64,
    pub cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "beta>gamma")]
    BetaAboveGamma,
    #[serde(rename = "beta=gamma")]
    BetaEqualsGamma,
    #[serde(rename = "beta<gamma")]
    BetaBelowGamma,
}

impl Regime {
    pub fn classify(beta: f64, gamma: f64) -> Regime {
        if (beta - gamma).abs() < REGIME_TOLERANCE {
            Regime::BetaEqualsGamma
        } else if beta > gamma {
            Regime::BetaAboveGamma
        } else {
            Regime::BetaBelowGamma
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningFit {
    pub alpha: f64,
    pub c_alpha: f64,
    pub beta: f64,
    pub c_beta: f64,
    pub beta_star: f64,
    pub c_beta_star: f64,
    pub gamma: f64,
    pub c_gamma: f64,
    pub regime: Regime,
    /// Whether `alpha >= min(beta, gamma) / 2`.
    pub hypothesis_holds: bool,
}

/// Least-squares line `log y = log c + slope log h`; returns `(slope, c)`.
pub fn fit_power_law(h: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if h.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: h.len(), got: y.len() });
    }
    if h.len() < 2 {
        return Err(Error::domain("a rate fit needs at least two points"));
    }
    if h.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::domain("degenerate data: rate fits need positive finite values"));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let z: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let mz = z.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("degenerate fit: all mesh sizes are equal"));
    }
    let sxz: f64 = x.iter().zip(&z).map(|(a, b)| (a - mx) * (b - mz)).sum();
    let slope = sxz / sxx;
    Ok((slope, (mz - slope * mx).exp()))
}

/// Fits `alpha`, `beta`, `beta*` on levels `l >= 1` and `gamma` on all levels.
pub fn fit_rates(levels: &[LevelScreen]) -> Result<ScreeningFit> {
    let upper: Vec<&LevelScreen> = levels.iter().filter(|s| s.l >= 1).collect();
    if upper.len() < 2 {
        return Err(Error::domain("rate fits need at least two levels with l >= 1"));
    }
    let h: Vec<f64> = upper.iter().map(|s| s.h).collect();
    let (alpha, c_alpha) =
        fit_power_law(&h, &upper.iter().map(|s| s.max_abs_z).collect::<Vec<_>>())?;
    let (beta, c_beta) = fit_power_law(&h, &upper.iter().map(|s| s.max_v).collect::<Vec<_>>())?;
    let (beta_star, c_beta_star) =
        fit_power_law(&h, &upper.iter().map(|s| s.max_v_classical).collect::<Vec<_>>())?;
    let h_all: Vec<f64> = levels.iter().map(|s| s.h).collect();
    let (slope, c_gamma) =
        fit_power_law(&h_all, &levels.iter().map(|s| s.cost).collect::<Vec<_>>())?;
    let gamma = -slope;
    Ok(ScreeningFit {
        alpha,
        c_alpha,
        beta,
        c_beta,
        beta_star,
        c_beta_star,
        gamma,
        c_gamma,
        regime: Regime::classify(beta, gamma),
        hypothesis_holds: alpha >= 0.5 * beta.min(gamma),
    })
}

/// Asymptotic cost envelope for accuracy `eps` in the fitted regime.
pub fn complexity_bound(fit: &ScreeningFit, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < (-1.0f64).exp()) {
        return Err(Error::domain(format!("eps must lie in (0, 1/e), got {eps}")));
    }
    Ok(match fit.regime {
        Regime::BetaAboveGamma => eps.powi(-2),
        Regime::BetaEqualsGamma => eps.powi(-2) * eps.ln().powi(2),
        Regime::BetaBelowGamma => eps.powf(-2.0 - (fit.gamma - fit.beta) / fit.alpha),
    })
}
