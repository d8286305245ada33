use crate::error::{Error, Result};
use crate::model::{HeatProblem, KappaParam};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// How the per-sample cost `C_l` of a level is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostModel {
    /// `C_l = cost_per_element * E_l`; deterministic.
    #[default]
    Synthetic,
    /// Average wall-clock time of one coupled sample during screening.
    Measured,
}

/// The three covariance estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// Multilevel estimator driven by unbiased h-statistic variance estimates.
    HstatMlmc,
    /// Multilevel estimator driven by the classical worst-case bound.
    ClassicalMlmc,
    /// Single-level Monte Carlo on the finest mesh.
    Mc,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] =
        [EstimatorKind::HstatMlmc, EstimatorKind::ClassicalMlmc, EstimatorKind::Mc];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::HstatMlmc => "hstat-mlmc",
            EstimatorKind::ClassicalMlmc => "classical-mlmc",
            EstimatorKind::Mc => "mc",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator '{s}'")))
    }
}

impl FromStr for CostModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synthetic" => Ok(CostModel::Synthetic),
            "measured" => Ok(CostModel::Measured),
            _ => Err(Error::Config(format!("unknown cost model '{s}'"))),
        }
    }
}

impl FromStr for KappaParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moments" => Ok(KappaParam::Moments),
            "log" => Ok(KappaParam::Log),
            _ => Err(Error::Config(format!("unknown kappa parameterization '{s}'"))),
        }
    }
}

/// Everything a run needs. Every key is optional in the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: HeatProblem,
    /// Elements of the coarsest mesh.
    pub e0: usize,
    /// Index of the finest level; the hierarchy has `levels + 1` meshes.
    pub levels: usize,
    pub run_seed: u64,
    pub screening_samples: usize,
    pub eps2_half: Vec<f64>,
    pub cost_model: CostModel,
    /// `kappa_c` of the synthetic cost model.
    pub cost_per_element: f64,
    /// Allocation rounds allowed after the first before giving up on the target.
    pub max_topups: usize,
    pub out_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: HeatProblem::default(),
            e0: 8,
            levels: 3,
            run_seed: 20_240_601,
            screening_samples: 50,
            eps2_half: vec![1e-3, 0.75e-3, 0.5e-3],
            cost_model: CostModel::Synthetic,
            cost_per_element: 1e-6,
            max_topups: 10,
            out_dir: "hcov-out".into(),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("invalid value '{v}' for '{key}'")))
}

impl RunConfig {
    /// Parses flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", no + 1)))?;
            c.set(key.trim(), value.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "length" => self.problem.length = parse_value(key, v)?,
            "flux" => self.problem.flux = parse_value(key, v)?,
            "boundary_temp" => self.problem.boundary_temp = parse_value(key, v)?,
            "kappa_mean" => self.problem.kappa_mean = parse_value(key, v)?,
            "kappa_std" => self.problem.kappa_std = parse_value(key, v)?,
            "kappa_param" => self.problem.kappa_param = v.parse()?,
            "e0" => self.e0 = parse_value(key, v)?,
            "levels" => self.levels = parse_value(key, v)?,
            "run_seed" => self.run_seed = parse_value(key, v)?,
            "screening_samples" => self.screening_samples = parse_value(key, v)?,
            "eps2_half" => self.eps2_half = parse_list(v)?,
            "cost_model" => self.cost_model = v.parse()?,
            "cost_per_element" => self.cost_per_element = parse_value(key, v)?,
            "max_topups" => self.max_topups = parse_value(key, v)?,
            "out_dir" => self.out_dir = v.to_string(),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.e0 < 2 {
            return Err(Error::Config("e0 must be at least 2".into()));
        }
        if self.levels > 20 {
            return Err(Error::Config("levels must be at most 20".into()));
        }
        if self.screening_samples < 4 {
            return Err(Error::Config("screening_samples must be at least 4".into()));
        }
        if self.eps2_half.is_empty() {
            return Err(Error::Config("eps2_half needs at least one value".into()));
        }
        if self.eps2_half.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::Config("eps2_half values must be positive".into()));
        }
        if !(self.cost_per_element > 0.0 && self.cost_per_element.is_finite()) {
            return Err(Error::Config("cost_per_element must be positive".into()));
        }
        Ok(())
    }
}

/// Comma-separated positive reals.
pub fn parse_list(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| parse_value("eps2_half", s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(RunConfig::parse("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn keys_and_comments() {
        let c = RunConfig::parse(
            "kappa_std = 0   # switch off randomness\ne0=4\nlevels = 2\neps2_half = 1e-3, 5e-4\ncost_model = measured\n",
        )
        .unwrap();
        assert_eq!(c.problem.kappa_std, 0.0);
        assert_eq!((c.e0, c.levels), (4, 2));
        assert_eq!(c.eps2_half, vec![1e-3, 5e-4]);
        assert_eq!(c.cost_model, CostModel::Measured);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "nonsense",
            "colour = red",
            "e0 = x",
            "e0 = 1",
            "eps2_half = -1",
            "screening_samples = 3",
            "kappa_std = -0.1",
            "cost_model = fast",
        ] {
            let err = RunConfig::parse(text).unwrap_err();
            assert!(err.is_config(), "{text}: {err}");
        }
    }

    #[test]
    fn estimator_names_round_trip() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("mlmc".parse::<EstimatorKind>().is_err());
    }
}
