use super::sums::PowerSums2;
use super::ustat::central_product;
use crate::error::{require_samples, Error, Result};
use serde::{Deserialize, Serialize};

/// Population central moments of a pair `(X, Y)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CentralMoments2 {
    pub m11: f64,
    pub m20: f64,
    pub m02: f64,
    pub m22: f64,
}

impl CentralMoments2 {
    /// Validates `m20, m02 >= 0` and Cauchy-Schwarz up to rounding.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12 * (self.m20 * self.m02).abs().max(1.0);
        if self.m20 < 0.0 || self.m02 < 0.0 || self.m11 * self.m11 > self.m20 * self.m02 + tol {
            return Err(Error::domain("central moments violate positivity or Cauchy-Schwarz"));
        }
        Ok(())
    }
}

/// Unbiased covariance `(n s11 - s01 s10) / ((n-1) n)`.
pub fn h11(ps: &PowerSums2) -> Result<f64> {
    require_samples("h11", ps.n(), 2)?;
    let n = ps.n() as f64;
    Ok((n * ps.s(1, 1) - ps.s(0, 1) * ps.s(1, 0)) / ((n - 1.0) * n))
}

/// Coefficients `(a1, a2, a3)` of the unbiased ansatz
/// `a1 h22 + a2 h11^2 + a3 h02 h20` for `Var(h11)`.
pub fn bivariate_ansatz_coeffs(n: usize) -> Result<(f64, f64, f64)> {
    if n <= 3 {
        return Err(Error::domain(format!("bivariate ansatz needs n > 3, got {n}")));
    }
    let n = n as f64;
    let d2 = n * n - 2.0 * n + 3.0;
    let d3 = n.powi(3) - 4.0 * n * n + 7.0 * n - 6.0;
    Ok(((n - 1.0) / d2, (-5.0 + 4.0 * n - n * n) / d3, (n - 1.0) / d3))
}

/// Unbiased estimate of `Var(h11)` as a closed-form polynomial in power sums.
pub fn var_h11_unbiased(ps: &PowerSums2) -> Result<f64> {
    require_samples("var_h11_unbiased", ps.n(), 4)?;
    let n = ps.n() as f64;
    Ok(var_h11_numerator(ps) / ((n - 3.0) * (n - 2.0) * (n - 1.0).powi(2) * n * n))
}

/// Shared numerator of the `Var(h11)` closed form. Over `(X+, X-)` samples the
/// same polynomial divided by `(n-3)(n-2)(n-1)^2 n` gives the per-sample
/// variance constant of the h2 level difference.
pub(crate) fn var_h11_numerator(ps: &PowerSums2) -> f64 {
    let n = ps.n() as f64;
    let s10 = ps.s(1, 0);
    let s01 = ps.s(0, 1);
    let s11 = ps.s(1, 1);
    let s20 = ps.s(2, 0);
    let s02 = ps.s(0, 2);
    let s21 = ps.s(2, 1);
    let s12 = ps.s(1, 2);
    let s22 = ps.s(2, 2);
    let nm1 = n - 1.0;
    n * ((-n * n + n + 2.0) * s11 * s11
        + nm1 * nm1 * (n * s22 - 2.0 * s10 * s12)
        + nm1 * s02 * (s10 * s10 - s20))
        + s01 * s01 * ((6.0 - 4.0 * n) * s10 * s10 + nm1 * n * s20)
        - 2.0 * n * s01 * (nm1 * nm1 * s21 + (5.0 - 3.0 * n) * s10 * s11)
}

/// The same estimator assembled from h-statistics and ansatz coefficients.
pub fn var_h11_ansatz(ps: &PowerSums2) -> Result<f64> {
    require_samples("var_h11_ansatz", ps.n(), 4)?;
    let (a1, a2, a3) = bivariate_ansatz_coeffs(ps.n())?;
    let h22 = central_product(ps, &[0, 0, 1, 1])?;
    let h11v = central_product(ps, &[0, 1])?;
    let h20 = central_product(ps, &[0, 0])?;
    let h02 = central_product(ps, &[1, 1])?;
    Ok(a1 * h22 + a2 * h11v * h11v + a3 * h02 * h20)
}

/// Exact `Var(h11)` for `n` samples from population central moments.
pub fn var_h11_analytic(m: &CentralMoments2, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("var_h11_analytic needs n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(m.m22 / n - (n - 2.0) * m.m11 * m.m11 / (n * (n - 1.0)) + m.m02 * m.m20 / (n * (n - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{h2, PowerSums1};

    const LINE: [(f64, f64); 4] = [(1.0, 2.0), (2.0, 4.0), (3.0, 6.0), (4.0, 8.0)];

    #[test]
    fn h11_examples() {
        let ps = PowerSums2::from_pairs(&LINE).unwrap();
        assert!((h11(&ps).unwrap() - 10.0 / 3.0).abs() < 1e-14);
        let flat = PowerSums2::from_pairs(&[(2.0, 1.0), (2.0, 5.0), (2.0, -3.0)]).unwrap();
        assert_eq!(h11(&flat).unwrap(), 0.0);
        let xs = [0.5, 1.5, -2.0, 4.0];
        let same = PowerSums2::from_pairs(&xs.map(|x| (x, x))).unwrap();
        let uni = PowerSums1::from_values(&xs).unwrap();
        assert!((h11(&same).unwrap() - h2(&uni).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn coefficients_at_four() {
        let (a1, a2, a3) = bivariate_ansatz_coeffs(4).unwrap();
        assert!((a1 - 3.0 / 11.0).abs() < 1e-15);
        assert!((a2 + 5.0 / 22.0).abs() < 1e-15);
        assert!((a3 - 3.0 / 22.0).abs() < 1e-15);
        assert!(bivariate_ansatz_coeffs(3).is_err());
        let (a1, _, _) = bivariate_ansatz_coeffs(1_000_000).unwrap();
        assert!((a1 * 1e6 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn closed_form_matches_ansatz() {
        let ps = PowerSums2::from_pairs(&LINE).unwrap();
        let a = var_h11_unbiased(&ps).unwrap();
        let b = var_h11_ansatz(&ps).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn constant_pairs_give_zero() {
        let ps = PowerSums2::from_pairs(&[(1.5, -2.0); 5]).unwrap();
        assert_eq!(var_h11_unbiased(&ps).unwrap(), 0.0);
        let short = PowerSums2::from_pairs(&LINE[..3]).unwrap();
        assert!(var_h11_unbiased(&short).is_err());
    }

    #[test]
    fn analytic_examples() {
        let m = CentralMoments2 { m11: 0.0, m20: 1.0, m02: 1.0, m22: 0.0 };
        assert_eq!(var_h11_analytic(&m, 2).unwrap(), 0.5);
        assert_eq!(var_h11_analytic(&CentralMoments2::default(), 7).unwrap(), 0.0);
        assert!(var_h11_analytic(&m, 1).is_err());
    }
}
