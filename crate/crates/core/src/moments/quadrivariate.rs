//! Level-difference statistics over quadruples `(g, h, i, j)` where `(g, h)`
//! is a fine-level pair and `(i, j)` the coarse-level pair of the same sample.

use super::sums::{PowerSums4, IDX4};
use super::ustat::central_product;
use crate::error::{require_samples, Error, Result};
use serde::{Deserialize, Serialize};

/// Population central moments `mu_{p,q,r,s}` of `(G, H, I, J)` entering the
/// variance of the level difference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CentralMoments4 {
    pub m0011: f64,
    pub m1100: f64,
    pub m0002: f64,
    pub m0020: f64,
    pub m0022: f64,
    pub m0200: f64,
    pub m2000: f64,
    pub m2200: f64,
    pub m1111: f64,
    pub m0110: f64,
    pub m1001: f64,
    pub m0101: f64,
    pub m1010: f64,
}

impl CentralMoments4 {
    pub fn validate(&self) -> Result<()> {
        if [self.m0002, self.m0020, self.m0200, self.m2000].iter().any(|&v| v < 0.0) {
            return Err(Error::domain("pure second moments must be nonnegative"));
        }
        Ok(())
    }
}

/// Level difference `h11(g, h) - h11(i, j)` on the same samples.
pub fn z_l(ps: &PowerSums4) -> Result<f64> {
    require_samples("z_l", ps.n(), 2)?;
    let n = ps.n() as f64;
    let fine = n * ps.s([1, 1, 0, 0]) - ps.s([0, 1, 0, 0]) * ps.s([1, 0, 0, 0]);
    let coarse = n * ps.s([0, 0, 1, 1]) - ps.s([0, 0, 0, 1]) * ps.s([0, 0, 1, 0]);
    Ok(fine / ((n - 1.0) * n) - coarse / ((n - 1.0) * n))
}

/// The ten ansatz coefficients `a1..a10` in their published numbering.
pub fn quadrivariate_ansatz_coeffs(n: usize) -> Result<[f64; 10]> {
    if n <= 3 {
        return Err(Error::domain(format!("quadrivariate ansatz needs n > 3, got {n}")));
    }
    let n = n as f64;
    let d3 = n.powi(3) - 4.0 * n * n + 7.0 * n - 6.0;
    let d2 = n * n - 2.0 * n + 3.0;
    let q = n * n - 4.0 * n + 5.0;
    Ok([
        -q / d3,
        (n - 1.0) / d3,
        (n - 1.0) / d2,
        -2.0 * (n - 1.0) / d3,
        -2.0 * (n - 1.0) / d3,
        2.0 * (n * n - 3.0 * n + 4.0) / d3,
        -q / d3,
        -2.0 * (n - 1.0) / d2,
        (n - 1.0) / d3,
        (n - 1.0) / d2,
    ])
}

/// Products of h-statistics multiplied by `a1..a10` respectively.
///
/// The pairing follows the expectation identity that defines the
/// coefficients: for example `a3` must multiply `h_{0,0,2,2}` for the
/// `mu_{0,0,2,2}/N` term to be matched, and `a8` multiplies `h_{1,1,1,1}`.
pub fn quadrivariate_ansatz_terms(ps: &PowerSums4) -> Result<[f64; 10]> {
    let h = |slots: &[usize]| central_product(ps, slots);
    let h0011 = h(&[2, 3])?;
    let h1100 = h(&[0, 1])?;
    Ok([
        h0011 * h0011,
        h(&[3, 3])? * h(&[2, 2])?,
        h(&[2, 2, 3, 3])?,
        h(&[1, 2])? * h(&[0, 3])?,
        h(&[1, 3])? * h(&[0, 2])?,
        h1100 * h0011,
        h1100 * h1100,
        h(&[0, 1, 2, 3])?,
        h(&[1, 1])? * h(&[0, 0])?,
        h(&[0, 0, 1, 1])?,
    ])
}

/// Unbiased `Var(Z_l)` assembled from h-statistics and ansatz coefficients.
pub fn var_zl_ansatz(ps: &PowerSums4) -> Result<f64> {
    require_samples("var_zl_ansatz", ps.n(), 4)?;
    let a = quadrivariate_ansatz_coeffs(ps.n())?;
    let t = quadrivariate_ansatz_terms(ps)?;
    Ok(a.iter().zip(t.iter()).map(|(a, t)| a * t).sum())
}

/// Positions of each multi-index in the [`IDX4`] table.
mod at {
    pub const S1000: usize = 0;
    pub const S0100: usize = 1;
    pub const S0010: usize = 2;
    pub const S0001: usize = 3;
    pub const S1100: usize = 4;
    pub const S0011: usize = 5;
    pub const S2000: usize = 6;
    pub const S0200: usize = 7;
    pub const S0020: usize = 8;
    pub const S0002: usize = 9;
    pub const S1010: usize = 10;
    pub const S1001: usize = 11;
    pub const S0110: usize = 12;
    pub const S0101: usize = 13;
    pub const S2100: usize = 14;
    pub const S1200: usize = 15;
    pub const S0021: usize = 16;
    pub const S0012: usize = 17;
    pub const S2200: usize = 18;
    pub const S0022: usize = 19;
    pub const S1110: usize = 20;
    pub const S1101: usize = 21;
    pub const S1011: usize = 22;
    pub const S0111: usize = 23;
    pub const S1111: usize = 24;
}

/// Unbiased `Var(Z_l)` as a closed-form polynomial in quadrivariate power
/// sums over `(n-3)(n-2)(n-1)^2 n^2`.
pub fn var_zl_unbiased(ps: &PowerSums4) -> Result<f64> {
    require_samples("var_zl_unbiased", ps.n(), 4)?;
    debug_assert_eq!(IDX4[at::S1111], [1, 1, 1, 1]);
    let n = ps.n() as f64;
    let v = ps.values();
    let s1000 = v[at::S1000];
    let s0100 = v[at::S0100];
    let s0010 = v[at::S0010];
    let s0001 = v[at::S0001];
    let s1100 = v[at::S1100];
    let s0011 = v[at::S0011];
    let s2000 = v[at::S2000];
    let s0200 = v[at::S0200];
    let s0020 = v[at::S0020];
    let s0002 = v[at::S0002];
    let s1010 = v[at::S1010];
    let s1001 = v[at::S1001];
    let s0110 = v[at::S0110];
    let s0101 = v[at::S0101];
    let s2100 = v[at::S2100];
    let s1200 = v[at::S1200];
    let s0021 = v[at::S0021];
    let s0012 = v[at::S0012];
    let s2200 = v[at::S2200];
    let s0022 = v[at::S0022];
    let s1110 = v[at::S1110];
    let s1101 = v[at::S1101];
    let s1011 = v[at::S1011];
    let s0111 = v[at::S0111];
    let s1111 = v[at::S1111];

    let n2 = n * n;
    let n3 = n2 * n;
    let n4 = n3 * n;

    let p4 = s0022 - 2.0 * s1111 + s2200;
    let p3 = -s0011 * s0011 - s1100 * s1100 - 2.0 * s0010 * s0012 - 2.0 * s0022
        + 2.0 * s0111 * s1000
        + 2.0 * s0100 * s1011
        + 2.0 * s0011 * s1100
        + 2.0 * s0010 * s1101
        + 4.0 * s1111
        - 2.0 * s1000 * s1200
        - 2.0 * s0100 * s2100
        - 2.0 * s2200;
    let p2 = s0011 * s0011 + s0200 * s1000 * s1000 + s1100 * s1100 + 4.0 * s0010 * s0012 + s0022
        - 4.0 * s0011 * s0100 * s1000
        - 2.0 * s0010 * s0101 * s1000
        - 4.0 * s0111 * s1000
        - 2.0 * s0010 * s0100 * s1001
        + 2.0 * s0110 * s1001
        + 2.0 * s0101 * s1010
        - 4.0 * s0100 * s1011
        - 4.0 * s0011 * s1100
        + 6.0 * s0100 * s1000 * s1100
        - 4.0 * s0010 * s1101
        - 2.0 * s1111
        + 4.0 * s1000 * s1200
        + s0100 * s0100 * s2000
        - s0200 * s2000
        + 4.0 * s0100 * s2100
        + s2200;
    let p1 = 2.0 * s0011 * s0011 - 4.0 * s0100 * s0100 * s1000 * s1000 - s0200 * s1000 * s1000
        + 2.0 * s1100 * s1100
        - 2.0 * s0010 * s0012
        + 8.0 * s0011 * s0100 * s1000
        + 2.0 * s0010 * s0101 * s1000
        + 2.0 * s0111 * s1000
        + 2.0 * s0010 * s0100 * s1001
        - 2.0 * s0110 * s1001
        - 2.0 * s0101 * s1010
        + 2.0 * s0100 * s1011
        - 2.0 * s0011 * s1100
        - 10.0 * s0100 * s1000 * s1100
        + 2.0 * s0010 * s1101
        - 2.0 * s1000 * s1200
        - s0100 * s0100 * s2000
        + s0200 * s2000
        - 2.0 * s0100 * s2100;
    let coarse_sq = (n - 1.0) * n * s0002 * (s0010 * s0010 - s0020);
    let p0 = 6.0 * s0100 * s0100 * s1000 * s1000
        + s0001 * s0001 * ((6.0 - 4.0 * n) * s0010 * s0010 + (n - 1.0) * n * s0020)
        - 2.0
            * s0001
            * (s0010
                * (n * (5.0 - 3.0 * n) * s0011
                    + 2.0 * (3.0 - 2.0 * n) * s0100 * s1000
                    + 2.0 * (n - 2.0) * n * s1100)
                + (n - 1.0)
                    * n
                    * ((n - 1.0) * s0021 + s0110 * s1000 + s0100 * s1010 - n * s1110 + s1110));

    let num = p4 * n4 + p3 * n3 + p2 * n2 + p1 * n + coarse_sq + p0;
    Ok(num / ((n - 3.0) * (n - 2.0) * (n - 1.0).powi(2) * n2))
}

/// Exact `Var(Z_l)` for `n` samples from population central moments.
pub fn var_zl_analytic(m: &CentralMoments4, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("var_zl_analytic needs n >= 2, got {n}")));
    }
    let n = n as f64;
    let pair = (n - 1.0) * n;
    Ok(-(n - 2.0) * m.m0011 * m.m0011 / pair + 2.0 * m.m1100 * m.m0011 / n
        + m.m0002 * m.m0020 / pair
        + m.m0022 / n
        + m.m0200 * m.m2000 / pair
        + m.m2200 / n
        - 2.0 * m.m1111 / n
        - (n - 2.0) * m.m1100 * m.m1100 / pair
        - 2.0 * m.m0110 * m.m1001 / pair
        - 2.0 * m.m0101 * m.m1010 / pair)
}
