use super::sums::PowerSums1;
use super::univariate::biased_fourth_central;
use crate::error::{require_samples, Error, Result};

/// Worst-case bound on the variance of the classical level covariance term
/// built from biased fourth moments of `X+ = u_fine + u_coarse` and
/// `X- = u_fine - u_coarse` at nodes i and j.
///
/// At the base level pass `X+ = X- = u`; the bound then collapses to
/// `sqrt(m4(u_i) m4(u_j)) / (n - 1)`.
pub fn classical_level_bound(
    plus_i: &PowerSums1,
    minus_i: &PowerSums1,
    plus_j: &PowerSums1,
    minus_j: &PowerSums1,
    n: usize,
) -> Result<f64> {
    require_samples("classical_level_bound", n, 2)?;
    for ps in [plus_i, minus_i, plus_j, minus_j] {
        if ps.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ps.n() });
        }
    }
    let mp_i = biased_fourth_central(plus_i)?;
    let mm_i = biased_fourth_central(minus_i)?;
    let mp_j = biased_fourth_central(plus_j)?;
    let mm_j = biased_fourth_central(minus_j)?;
    Ok(((mm_i * mp_j).sqrt() + (mp_i * mm_j).sqrt()) / (2.0 * (n as f64 - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(xs: &[f64]) -> PowerSums1 {
        PowerSums1::from_values(xs).unwrap()
    }

    #[test]
    fn identical_levels_give_zero() {
        let plus = ps(&[2.0, 4.0, 6.0, 1.0]);
        let minus = ps(&[0.0; 4]);
        assert_eq!(classical_level_bound(&plus, &minus, &plus, &minus, 4).unwrap(), 0.0);
    }

    #[test]
    fn base_level_collapse() {
        let ui = ps(&[0.0, 1.0, 3.0, 2.0, 5.0]);
        let uj = ps(&[1.0, -1.0, 2.0, 2.0, 0.5]);
        let b = classical_level_bound(&ui, &ui, &uj, &uj, 5).unwrap();
        let m_i = biased_fourth_central(&ui).unwrap();
        let m_j = biased_fourth_central(&uj).unwrap();
        assert!((b - (m_i * m_j).sqrt() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn count_mismatch_is_an_error() {
        let a = ps(&[0.0, 1.0, 3.0]);
        assert!(classical_level_bound(&a, &a, &a, &a, 4).is_err());
        assert!(classical_level_bound(&a, &a, &a, &a, 1).is_err());
    }
}
