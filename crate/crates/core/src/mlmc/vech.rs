use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Symmetric matrix stored as its half-vectorization: the lower triangle
/// stacked column by column (`H11, .., HM1, H22, .., HMM`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymCovMatrix {
    m: usize,
    vech: Vec<f64>,
}

/// Length of the half-vectorization of an `m x m` matrix.
pub fn vech_len(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Position of entry `(i, j)` in the half-vectorization.
pub fn vech_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    debug_assert!(i < m);
    // Entries before column j: sum over c < j of (m - c).
    j * m - j * j.saturating_sub(1) / 2 + (i - j)
}

/// Row and column of every half-vectorization position, in storage order.
pub fn vech_pairs(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(vech_len(m));
    for j in 0..m {
        for i in j..m {
            out.push((i, j));
        }
    }
    out
}

impl SymCovMatrix {
    pub fn zeros(m: usize) -> Self {
        SymCovMatrix { m, vech: vec![0.0; vech_len(m)] }
    }

    /// Wraps a half-vectorization, inferring the dimension from its length.
    pub fn from_vech(vech: Vec<f64>) -> Result<Self> {
        let len = vech.len();
        let m = (((8 * len + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
        if vech_len(m) != len {
            return Err(Error::domain(format!("{len} is not a triangular number")));
        }
        Ok(SymCovMatrix { m, vech })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn vech(&self) -> &[f64] {
        &self.vech
    }

    pub fn into_vech(self) -> Vec<f64> {
        self.vech
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.vech[vech_index(self.m, i, j)]
    }

    pub fn to_full(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| self.get(i, j))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for (i, j) in vech_pairs(self.m) {
            let v = self.get(i, j);
            s += if i == j { v * v } else { 2.0 * v * v };
        }
        s.sqrt()
    }
}

/// Half-vectorization of a full symmetric matrix.
pub fn vech(full: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = full.nrows();
    if full.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: full.ncols() });
    }
    let scale = full.amax().max(f64::MIN_POSITIVE);
    for j in 0..m {
        for i in j + 1..m {
            if (full[(i, j)] - full[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::domain(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(vech_pairs(m).into_iter().map(|(i, j)| full[(i, j)]).collect())
}

/// Inverse of [`vech`].
pub fn unvech(v: &[f64], m: usize) -> Result<SymCovMatrix> {
    if v.len() != vech_len(m) {
        return Err(Error::DimensionMismatch { expected: vech_len(m), got: v.len() });
    }
    Ok(SymCovMatrix { m, vech: v.to_vec() })
}
