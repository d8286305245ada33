use super::sums::PowerSums1;
use crate::error::{require_samples, Result};

/// Unbiased variance `(n s2 - s1^2) / (n (n-1))`.
pub fn h2(ps: &PowerSums1) -> Result<f64> {
    require_samples("h2", ps.n(), 2)?;
    let n = ps.n() as f64;
    let (s1, s2) = (ps.s(1), ps.s(2));
    Ok((n * s2 - s1 * s1) / (n * (n - 1.0)))
}

fn quartic_denominator(n: f64) -> f64 {
    n * (n - 1.0) * (n - 2.0) * (n - 3.0)
}

/// Fourth h-statistic, unbiased for the fourth central moment.
pub fn h4(ps: &PowerSums1) -> Result<f64> {
    require_samples("h4", ps.n(), 4)?;
    let n = ps.n() as f64;
    let (s1, s2, s3, s4) = (ps.s(1), ps.s(2), ps.s(3), ps.s(4));
    let num = -3.0 * s1.powi(4) + 6.0 * n * s1 * s1 * s2 + (9.0 - 6.0 * n) * s2 * s2
        + (-4.0 * n * n + 8.0 * n - 12.0) * s1 * s3
        + (n.powi(3) - 2.0 * n * n + 3.0 * n) * s4;
    Ok(num / quartic_denominator(n))
}

/// Polyache `h_{2,2}`, unbiased for the squared variance.
pub fn polyache22(ps: &PowerSums1) -> Result<f64> {
    require_samples("polyache22", ps.n(), 4)?;
    let n = ps.n() as f64;
    let (s1, s2, s3, s4) = (ps.s(1), ps.s(2), ps.s(3), ps.s(4));
    let num = s1.powi(4) - 2.0 * n * s1 * s1 * s2 + (n * n - 3.0 * n + 3.0) * s2 * s2
        + (4.0 * n - 4.0) * s1 * s3
        + (n - n * n) * s4;
    Ok(num / quartic_denominator(n))
}

/// Unbiased estimate of `Var(h2)`.
pub fn var_h2_plugin(ps: &PowerSums1) -> Result<f64> {
    require_samples("var_h2_plugin", ps.n(), 4)?;
    let n = ps.n() as f64;
    Ok((h4(ps)? - polyache22(ps)? * (n - 3.0) / (n - 1.0)) / n)
}

/// Biased sample fourth central moment `(1/n) sum (x - mean)^4`.
pub fn biased_fourth_central(ps: &PowerSums1) -> Result<f64> {
    require_samples("fourth central moment", ps.n(), 1)?;
    let n = ps.n() as f64;
    let m = ps.s(1) / n;
    let v = (ps.s(4) - 4.0 * m * ps.s(3) + 6.0 * m * m * ps.s(2) - 3.0 * n * m.powi(4)) / n;
    // Exact arithmetic gives v >= 0; clip rounding noise on near-constant data.
    Ok(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn ps(xs: &[f64]) -> PowerSums1 {
        PowerSums1::from_values(xs).unwrap()
    }

    #[test]
    fn h2_examples() {
        assert!((h2(&ps(&[1.0, 2.0, 3.0, 4.0])).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(h2(&ps(&[2.5, 2.5, 2.5])).unwrap(), 0.0);
        assert_eq!(h2(&ps(&[0.0, 1.0])).unwrap(), 0.5);
        assert!(matches!(h2(&ps(&[1.0])), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn constant_data_vanishes() {
        let c = ps(&[3.0; 6]);
        assert_eq!(h4(&c).unwrap(), 0.0);
        assert_eq!(polyache22(&c).unwrap(), 0.0);
        assert_eq!(var_h2_plugin(&c).unwrap(), 0.0);
    }

    #[test]
    fn zero_one_data() {
        // S1 = S2 = S3 = S4 = 2, N = 4, denominator 24.
        let d = ps(&[0.0, 0.0, 1.0, 1.0]);
        let h4v = (-3.0 * 16.0 + 6.0 * 4.0 * 4.0 * 2.0 + (9.0 - 24.0) * 4.0
            + (-64.0 + 32.0 - 12.0) * 4.0
            + (64.0 - 32.0 + 12.0) * 2.0)
            / 24.0;
        let polv = (16.0 - 2.0 * 4.0 * 4.0 * 2.0 + (16.0 - 12.0 + 3.0) * 4.0 + 12.0 * 4.0
            + (-16.0 + 4.0) * 2.0)
            / 24.0;
        assert!((h4(&d).unwrap() - h4v).abs() < 1e-14);
        assert!((polyache22(&d).unwrap() - polv).abs() < 1e-14);
        let expected = 0.25 * (h4v - polv / 3.0);
        assert!((var_h2_plugin(&d).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn insufficient_samples() {
        let d = ps(&[0.0, 1.0, 2.0]);
        assert!(h4(&d).is_err());
        assert!(polyache22(&d).is_err());
        assert!(var_h2_plugin(&d).is_err());
    }

    #[test]
    fn biased_fourth_moment() {
        let d = ps(&[0.0, 0.0, 1.0, 1.0]);
        assert!((biased_fourth_central(&d).unwrap() - 0.0625).abs() < 1e-15);
        let shifted = PowerSums1::from_values(&[10.0, 10.0, 11.0, 11.0]).unwrap();
        assert!((biased_fourth_central(&shifted).unwrap() - 0.0625).abs() < 1e-12);
    }
}
