use super::mesh::{interpolate_to_finest, MeshHierarchy};
use super::problem::HeatProblem;
use super::solve::solve_heat;
use crate::error::Result;
use crate::rng::{sample_rng, Stream};
use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

/// Identifies the generator of one coupled sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSeed {
    pub run_seed: u64,
    #[serde(skip, default = "default_stream")]
    pub stream: Stream,
    pub index: u64,
}

fn default_stream() -> Stream {
    Stream::Screening
}

/// Fine and coarse solutions driven by the same conductivity draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSamplePair {
    pub l: usize,
    pub kappa: f64,
    pub u_fine: Vec<f64>,
    pub u_coarse: Option<Vec<f64>>,
    pub seed: SampleSeed,
}

/// One lognormal conductivity draw; exactly the deterministic value when the
/// spread is zero.
pub fn sample_kappa<R: Rng + ?Sized>(problem: &HeatProblem, rng: &mut R) -> f64 {
    if problem.kappa_std == 0.0 {
        return problem.deterministic_kappa();
    }
    let (mu, sigma) = problem.lognormal_params();
    LogNormal::new(mu, sigma).expect("validated parameters").sample(rng)
}

pub fn coupled_sample(
    problem: &HeatProblem,
    hier: &MeshHierarchy,
    l: usize,
    seed: SampleSeed,
) -> Result<LevelSamplePair> {
    let fine_mesh = hier.level(l)?;
    let mut rng = sample_rng(seed.run_seed, seed.stream, l, seed.index);
    let kappa = sample_kappa(problem, &mut rng);
    let u_fine = solve_heat(problem, fine_mesh, kappa)?;
    let u_coarse = if l > 0 { Some(solve_heat(problem, hier.level(l - 1)?, kappa)?) } else { None };
    Ok(LevelSamplePair { l, kappa, u_fine, u_coarse, seed })
}

impl LevelSamplePair {
    /// Fine and coarse solutions on the finest mesh.
    pub fn on_finest(&self, hier: &MeshHierarchy) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        let fine = interpolate_to_finest(&self.u_fine, self.l, hier)?;
        let coarse = match &self.u_coarse {
            Some(c) => Some(interpolate_to_finest(c, self.l - 1, hier)?),
            None => None,
        };
        Ok((fine, coarse))
    }
}
