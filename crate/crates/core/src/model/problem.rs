use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How `kappa_mean` and `kappa_std` parameterize the lognormal conductivity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaParam {
    /// Mean and standard deviation of the conductivity itself.
    #[default]
    Moments,
    /// Mean and standard deviation of `ln kappa`.
    Log,
}

/// Steady 1D heat conduction `-kappa u'' = f` on `(0, length)` with fixed
/// boundary temperature and a random, spatially constant conductivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatProblem {
    pub length: f64,
    pub flux: f64,
    pub boundary_temp: f64,
    pub kappa_mean: f64,
    pub kappa_std: f64,
    pub kappa_param: KappaParam,
}

impl Default for HeatProblem {
    fn default() -> Self {
        HeatProblem {
            length: 1.0,
            flux: 5.0,
            boundary_temp: 273.0,
            kappa_mean: 0.1,
            kappa_std: 0.03,
            kappa_param: KappaParam::Moments,
        }
    }
}

impl HeatProblem {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.length, self.flux, self.boundary_temp, self.kappa_mean, self.kappa_std]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite("heat problem parameters"));
        }
        if self.length <= 0.0 {
            return Err(Error::domain("length must be positive"));
        }
        if self.kappa_param == KappaParam::Moments && self.kappa_mean <= 0.0 {
            return Err(Error::domain("kappa_mean must be positive"));
        }
        if self.kappa_std < 0.0 {
            return Err(Error::domain("kappa_std must be nonnegative"));
        }
        Ok(())
    }

    /// `(mu, sigma)` of the underlying normal of `ln kappa`.
    pub fn lognormal_params(&self) -> (f64, f64) {
        match self.kappa_param {
            KappaParam::Moments => {
                let s2 = (1.0 + (self.kappa_std / self.kappa_mean).powi(2)).ln();
                (self.kappa_mean.ln() - 0.5 * s2, s2.sqrt())
            }
            KappaParam::Log => (self.kappa_mean, self.kappa_std),
        }
    }

    /// Conductivity used when the randomness is switched off.
    pub fn deterministic_kappa(&self) -> f64 {
        match self.kappa_param {
            KappaParam::Moments => self.kappa_mean,
            KappaParam::Log => self.kappa_mean.exp(),
        }
    }

    /// Exact solution `T + f x (length - x) / (2 kappa)`.
    pub fn exact_solution(&self, x: f64, kappa: f64) -> f64 {
        self.boundary_temp + self.flux * x * (self.length - x) / (2.0 * kappa)
    }

    /// `(E[1/kappa], Var(1/kappa))` of the lognormal conductivity.
    pub fn inverse_kappa_moments(&self) -> (f64, f64) {
        let (mu, sigma) = self.lognormal_params();
        let s2 = sigma * sigma;
        let mean = (-mu + 0.5 * s2).exp();
        (mean, (s2.exp() - 1.0) * (-2.0 * mu + s2).exp())
    }

    /// Exact mean temperature at `x`.
    pub fn exact_mean(&self, x: f64) -> f64 {
        let (m, _) = self.inverse_kappa_moments();
        self.boundary_temp + 0.5 * self.flux * x * (self.length - x) * m
    }

    /// Exact covariance of the temperatures at `xi` and `xj`.
    pub fn exact_covariance(&self, xi: f64, xj: f64) -> f64 {
        let (_, v) = self.inverse_kappa_moments();
        let (ci, cj) = (xi * (self.length - xi), xj * (self.length - xj));
        self.flux * self.flux * ci * cj * v / 4.0
    }
}
