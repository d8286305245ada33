//! Exact-enumeration certification of every unbiasedness claim.

use super::distribution::{
    bivariate_fixture, exact_central_moment, exact_expectation, quadrivariate_fixture,
    two_point_fixture, DiscreteDistribution,
};
use crate::error::Result;
use crate::moments::{
    h11, h2, h4, polyache22, var_h11_analytic, var_h11_unbiased, var_h2_plugin, var_zl_analytic,
    var_zl_unbiased, z_l, CentralMoments2, CentralMoments4, PowerSums1, PowerSums2, PowerSums4,
};
use serde::{Deserialize, Serialize};

/// Relative tolerance for every enumeration check.
pub const CERTIFY_TOLERANCE: f64 = 1e-10;

type Stat<P> = Box<dyn Fn(&P) -> Result<f64> + Send + Sync>;

/// The estimators under certification. Tests swap single entries for
/// deliberately broken variants to confirm the suite notices.
pub struct Estimators {
    pub h2: Stat<PowerSums1>,
    pub h4: Stat<PowerSums1>,
    pub polyache22: Stat<PowerSums1>,
    pub var_h2: Stat<PowerSums1>,
    pub h11: Stat<PowerSums2>,
    pub var_h11: Stat<PowerSums2>,
    pub z_l: Stat<PowerSums4>,
    pub var_zl: Stat<PowerSums4>,
}

impl Default for Estimators {
    fn default() -> Self {
        Estimators {
            h2: Box::new(h2),
            h4: Box::new(h4),
            polyache22: Box::new(polyache22),
            var_h2: Box::new(var_h2_plugin),
            h11: Box::new(h11),
            var_h11: Box::new(var_h11_unbiased),
            z_l: Box::new(z_l),
            var_zl: Box::new(var_zl_unbiased),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            expected,
            actual,
            tolerance,
            passed: rel_close(actual, expected, tolerance),
        }
    }
}

/// `|a - b| <= tol * |b|`, with an absolute floor of `tol` when `b` is tiny.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-12) || (a - b).abs() <= tol * 1e-12
}

fn ps1(rows: &[&[f64]], v: usize) -> Result<PowerSums1> {
    let mut ps = PowerSums1::new();
    for r in rows {
        ps.push(r[v])?;
    }
    Ok(ps)
}

fn ps2(rows: &[&[f64]], a: usize, b: usize) -> Result<PowerSums2> {
    let mut ps = PowerSums2::new();
    for r in rows {
        ps.push(r[a], r[b])?;
    }
    Ok(ps)
}

fn ps4(rows: &[&[f64]]) -> Result<PowerSums4> {
    let mut ps = PowerSums4::new();
    for r in rows {
        ps.push([r[0], r[1], r[2], r[3]])?;
    }
    Ok(ps)
}

/// Pushes `(X+, X-) = (G + I, G - I)` built from the first and third slots.
fn ps_plus_minus(rows: &[&[f64]]) -> Result<PowerSums2> {
    let mut ps = PowerSums2::new();
    for r in rows {
        ps.push(r[0] + r[2], r[0] - r[2])?;
    }
    Ok(ps)
}

pub fn central_moments2(d: &DiscreteDistribution) -> Result<CentralMoments2> {
    Ok(CentralMoments2 {
        m11: exact_central_moment(d, &[1, 1])?,
        m20: exact_central_moment(d, &[2, 0])?,
        m02: exact_central_moment(d, &[0, 2])?,
        m22: exact_central_moment(d, &[2, 2])?,
    })
}

pub fn central_moments4(d: &DiscreteDistribution) -> Result<CentralMoments4> {
    let m = |e: [u32; 4]| exact_central_moment(d, &e);
    Ok(CentralMoments4 {
        m0011: m([0, 0, 1, 1])?,
        m1100: m([1, 1, 0, 0])?,
        m0002: m([0, 0, 0, 2])?,
        m0020: m([0, 0, 2, 0])?,
        m0022: m([0, 0, 2, 2])?,
        m0200: m([0, 2, 0, 0])?,
        m2000: m([2, 0, 0, 0])?,
        m2200: m([2, 2, 0, 0])?,
        m1111: m([1, 1, 1, 1])?,
        m0110: m([0, 1, 1, 0])?,
        m1001: m([1, 0, 0, 1])?,
        m0101: m([0, 1, 0, 1])?,
        m1010: m([1, 0, 1, 0])?,
    })
}

fn univariate_three_point() -> DiscreteDistribution {
    DiscreteDistribution::new(vec![vec![0.0], vec![1.0], vec![3.0]], vec![0.5, 0.3, 0.2])
        .expect("valid fixture")
}

/// Runs the full suite with the given estimators.
pub fn certify(est: &Estimators) -> Result<Vec<Check>> {
    let tol = CERTIFY_TOLERANCE;
    let mut checks = Vec::new();

    for (label, d) in [("two-point", two_point_fixture()), ("three-point", univariate_three_point())] {
        let mu2 = exact_central_moment(&d, &[2])?;
        let mu4 = exact_central_moment(&d, &[4])?;
        for n in [4usize, 5] {
            let e_h2 = exact_expectation(&d, n, |r| (est.h2)(&ps1(r, 0)?))?;
            checks.push(Check::new(format!("E[h2] = mu2 ({label}, N={n})"), mu2, e_h2, tol));
            let e_h4 = exact_expectation(&d, n, |r| (est.h4)(&ps1(r, 0)?))?;
            checks.push(Check::new(format!("E[h4] = mu4 ({label}, N={n})"), mu4, e_h4, tol));
            let e_p = exact_expectation(&d, n, |r| (est.polyache22)(&ps1(r, 0)?))?;
            checks.push(Check::new(format!("E[h22] = mu2^2 ({label}, N={n})"), mu2 * mu2, e_p, tol));
            let e_sq = exact_expectation(&d, n, |r| (est.h2)(&ps1(r, 0)?).map(|v| v * v))?;
            let e_v = exact_expectation(&d, n, |r| (est.var_h2)(&ps1(r, 0)?))?;
            checks.push(Check::new(
                format!("E[var h2] = Var(h2) ({label}, N={n})"),
                e_sq - mu2 * mu2,
                e_v,
                tol,
            ));
        }
    }

    let d2 = bivariate_fixture();
    let m2 = central_moments2(&d2)?;
    for n in [4usize, 5] {
        let e_h11 = exact_expectation(&d2, n, |r| (est.h11)(&ps2(r, 0, 1)?))?;
        checks.push(Check::new(format!("E[h11] = mu11 (bivariate, N={n})"), m2.m11, e_h11, tol));
        let e_sq = exact_expectation(&d2, n, |r| (est.h11)(&ps2(r, 0, 1)?).map(|v| v * v))?;
        let var_enum = e_sq - m2.m11 * m2.m11;
        let e_v = exact_expectation(&d2, n, |r| (est.var_h11)(&ps2(r, 0, 1)?))?;
        checks.push(Check::new(format!("E[var h11] = Var(h11) (bivariate, N={n})"), var_enum, e_v, tol));
        checks.push(Check::new(
            format!("analytic Var(h11) = enumerated (bivariate, N={n})"),
            var_enum,
            var_h11_analytic(&m2, n)?,
            tol,
        ));
    }

    let d4 = quadrivariate_fixture();
    let m4 = central_moments4(&d4)?;
    let target = m4.m1100 - m4.m0011;
    for n in [4usize, 5] {
        let e_z = exact_expectation(&d4, n, |r| (est.z_l)(&ps4(r)?))?;
        checks.push(Check::new(format!("E[Z] = mu11 fine - mu11 coarse (N={n})"), target, e_z, tol));
        let e_sq = exact_expectation(&d4, n, |r| (est.z_l)(&ps4(r)?).map(|v| v * v))?;
        let var_enum = e_sq - e_z * e_z;
        let e_v = exact_expectation(&d4, n, |r| (est.var_zl)(&ps4(r)?))?;
        checks.push(Check::new(format!("E[var Z] = Var(Z) (N={n})"), var_enum, e_v, tol));
        checks.push(Check::new(
            format!("analytic Var(Z) = enumerated (N={n})"),
            var_enum,
            var_zl_analytic(&m4, n)?,
            tol,
        ));

        // The h2 level difference equals h11 over (X+, X-).
        let diff = |r: &[&[f64]]| -> Result<f64> { Ok(h2(&ps1(r, 0)?)? - h2(&ps1(r, 2)?)?) };
        let e_d = exact_expectation(&d4, n, diff)?;
        let e_dsq = exact_expectation(&d4, n, |r| diff(r).map(|v| v * v))?;
        let e_vd = exact_expectation(&d4, n, |r| (est.var_h11)(&ps_plus_minus(r)?))?;
        checks.push(Check::new(
            format!("E[var dh2] = Var(h2 fine - h2 coarse) (N={n})"),
            e_dsq - e_d * e_d,
            e_vd,
            tol,
        ));
    }
    Ok(checks)
}
