use crate::error::{Error, Result};
use crate::moments::Compensated;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest number of ordered sample tuples [`exact_expectation`] will visit.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Finite-support distribution over real tuples of length `dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    dim: usize,
    atoms: Vec<Vec<f64>>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), got: probs.len() });
        }
        let dim = atoms[0].len();
        if !matches!(dim, 1 | 2 | 4) {
            return Err(Error::domain(format!("atom dimension must be 1, 2 or 4, got {dim}")));
        }
        if let Some(a) = atoms.iter().find(|a| a.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: a.len() });
        }
        if atoms.iter().flatten().chain(probs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("distribution"));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::domain("probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        for i in 0..atoms.len() {
            if atoms[i + 1..].contains(&atoms[i]) {
                return Err(Error::domain("atoms must be distinct"));
            }
        }
        Ok(DiscreteDistribution { dim, atoms, probs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|v| self.atoms.iter().zip(&self.probs).map(|(a, p)| p * a[v]).sum())
            .collect()
    }

    /// Image of the distribution under a map applied to every atom. Atoms
    /// that collide are merged.
    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut atoms: Vec<Vec<f64>> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        for (a, &p) in self.atoms.iter().zip(&self.probs) {
            let b = f(a);
            match atoms.iter().position(|x| *x == b) {
                Some(k) => probs[k] += p,
                None => {
                    atoms.push(b);
                    probs.push(p);
                }
            }
        }
        DiscreteDistribution::new(atoms, probs)
    }
}

/// Population central moment `E[prod_v (X_v - E X_v)^{e_v}]`.
pub fn exact_central_moment(d: &DiscreteDistribution, index: &[u32]) -> Result<f64> {
    if index.len() != d.dim {
        return Err(Error::DimensionMismatch { expected: d.dim, got: index.len() });
    }
    let mean = d.mean();
    Ok(d.atoms
        .iter()
        .zip(&d.probs)
        .map(|(a, p)| {
            p * index
                .iter()
                .enumerate()
                .map(|(v, &e)| (a[v] - mean[v]).powi(e as i32))
                .product::<f64>()
        })
        .sum())
}

/// Exact expectation of `statistic` over `n` iid draws, by enumerating all
/// `K^n` ordered tuples. The statistic receives the drawn atoms in order.
pub fn exact_expectation<F>(d: &DiscreteDistribution, n: usize, statistic: F) -> Result<f64>
where
    F: Fn(&[&[f64]]) -> Result<f64> + Sync,
{
    let k = d.atoms.len() as u128;
    let tuples = k.checked_pow(n as u32).unwrap_or(u128::MAX);
    if tuples > ENUMERATION_CAP {
        return Err(Error::Budget { tuples, cap: ENUMERATION_CAP });
    }
    let tuples = tuples as usize;
    const CHUNK: usize = 4096;
    let chunks = tuples.div_ceil(CHUNK);
    let partial: Vec<Result<Compensated>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Compensated::ZERO;
            let mut digits = vec![0usize; n];
            let mut rows: Vec<&[f64]> = vec![&[]; n];
            for t in c * CHUNK..((c + 1) * CHUNK).min(tuples) {
                let mut rest = t;
                for slot in digits.iter_mut() {
                    *slot = rest % d.atoms.len();
                    rest /= d.atoms.len();
                }
                let mut p = 1.0;
                for (slot, &a) in digits.iter().enumerate() {
                    p *= d.probs[a];
                    rows[slot] = &d.atoms[a];
                }
                if p != 0.0 {
                    acc.add(p * statistic(&rows)?);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = Compensated::ZERO;
    for part in partial {
        total.merge(&part?);
    }
    Ok(total.value())
}

/// Mean and standard error of a statistic over independent replications.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub mean: f64,
    pub stderr: f64,
    pub replications: usize,
}

/// Empirical expectation of `statistic` over `r` replications. Replication
/// `k` draws its own sample set through `sampler(k)`, so seeding is the
/// caller's responsibility and results are independent of thread count.
pub fn replicated_expectation<T, S, F>(r: usize, sampler: S, statistic: F) -> Result<Replication>
where
    T: Send,
    S: Fn(usize) -> Result<T> + Sync,
    F: Fn(&T) -> Result<f64> + Sync,
{
    if r < 100 {
        return Err(Error::domain(format!("replicated_expectation needs R >= 100, got {r}")));
    }
    let values: Vec<f64> = (0..r)
        .into_par_iter()
        .map(|k| sampler(k).and_then(|s| statistic(&s)))
        .collect::<Result<_>>()?;
    let mut sum = Compensated::ZERO;
    for &v in &values {
        sum.add(v);
    }
    let mean = sum.value() / r as f64;
    let mut sq = Compensated::ZERO;
    for &v in &values {
        sq.add((v - mean) * (v - mean));
    }
    let var = sq.value() / (r as f64 - 1.0);
    Ok(Replication { mean, stderr: (var / r as f64).sqrt(), replications: r })
}

/// Three-atom bivariate fixture with nondegenerate moments.
pub fn bivariate_fixture() -> DiscreteDistribution {
    DiscreteDistribution::new(
        vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![2.0, 1.0]],
        vec![0.5, 0.3, 0.2],
    )
    .expect("valid fixture")
}

/// Quadrivariate fixture: each bivariate atom `(g, h)` is paired with the
/// perturbed coarse copy `(g + 0.1 g^2, h - 0.1 h^2)`.
pub fn quadrivariate_fixture() -> DiscreteDistribution {
    bivariate_fixture()
        .map(|a| {
            let (g, h) = (a[0], a[1]);
            vec![g, h, g + 0.1 * g * g, h - 0.1 * h * h]
        })
        .expect("valid fixture")
}

/// Two equally likely atoms `{0, 1}`.
pub fn two_point_fixture() -> DiscreteDistribution {
    DiscreteDistribution::new(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).expect("valid fixture")
}
