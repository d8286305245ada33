use super::problem::HeatProblem;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshLevel {
    pub l: usize,
    pub elements: usize,
    pub nodes: usize,
    pub h: f64,
    pub coords: Vec<f64>,
}

/// Uniform nested meshes with `E_l = E0 2^l` elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshHierarchy {
    pub length: f64,
    pub levels: Vec<MeshLevel>,
}

pub fn build_hierarchy(problem: &HeatProblem, e0: usize, finest: usize) -> Result<MeshHierarchy> {
    problem.validate()?;
    if e0 < 2 {
        return Err(Error::domain(format!("E0 must be at least 2, got {e0}")));
    }
    if finest > 24 {
        return Err(Error::domain(format!("finest level {finest} is unreasonably deep")));
    }
    let levels = (0..=finest)
        .map(|l| {
            let elements = e0 << l;
            let h = problem.length / elements as f64;
            let coords = (0..=elements).map(|k| problem.length * k as f64 / elements as f64).collect();
            MeshLevel { l, elements, nodes: elements + 1, h, coords }
        })
        .collect();
    Ok(MeshHierarchy { length: problem.length, levels })
}

impl MeshHierarchy {
    pub fn finest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, l: usize) -> Result<&MeshLevel> {
        self.levels
            .get(l)
            .ok_or_else(|| Error::domain(format!("level {l} out of range 0..={}", self.finest())))
    }

    pub fn finest_level(&self) -> &MeshLevel {
        &self.levels[self.finest()]
    }
}

/// Linear interpolation of nodal values on `from_level` onto the finest
/// mesh. Coarse nodes pass through exactly.
pub fn interpolate_to_finest(values: &[f64], from_level: usize, hier: &MeshHierarchy) -> Result<Vec<f64>> {
    let from = hier.level(from_level)?;
    if values.len() != from.nodes {
        return Err(Error::DimensionMismatch { expected: from.nodes, got: values.len() });
    }
    let ratio = 1usize << (hier.finest() - from_level);
    if ratio == 1 {
        return Ok(values.to_vec());
    }
    let fine_nodes = hier.finest_level().nodes;
    let r = ratio as f64;
    Ok((0..fine_nodes)
        .map(|m| {
            let (q, t) = (m / ratio, m % ratio);
            if t == 0 {
                values[q]
            } else {
                ((ratio - t) as f64 * values[q] + t as f64 * values[q + 1]) / r
            }
        })
        .collect())
}
