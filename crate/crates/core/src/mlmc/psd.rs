use super::vech::{vech, SymCovMatrix};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Projects a symmetric matrix onto the PSD cone by keeping only the
/// eigenpairs with positive eigenvalue.
pub fn repair_psd(m: &SymCovMatrix) -> Result<SymCovMatrix> {
    let full = m.to_full();
    let n = full.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let eig = SymmetricEigen::try_new(full, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("symmetric eigen-decomposition did not converge".into()))?;
    let mut out = DMatrix::<f64>::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 0.0 {
            let q = eig.eigenvectors.column(k);
            out += lambda * q * q.transpose();
        }
    }
    // Outer products are symmetric up to rounding; average to make it exact.
    let sym = (&out + out.transpose()) * 0.5;
    SymCovMatrix::from_vech(vech(&sym)?)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &SymCovMatrix) -> Result<f64> {
    if m.dim() == 0 {
        return Ok(0.0);
    }
    let eig = SymmetricEigen::try_new(m.to_full(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("symmetric eigen-decomposition did not converge".into()))?;
    Ok(eig.eigenvalues.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlmc::vech::vech;

    fn sym(rows: usize, v: &[f64]) -> SymCovMatrix {
        SymCovMatrix::from_vech(vech(&DMatrix::from_row_slice(rows, rows, v)).unwrap()).unwrap()
    }

    #[test]
    fn identity_unchanged() {
        let id = sym(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let r = repair_psd(&id).unwrap();
        for (a, b) in r.vech().iter().zip(id.vech()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_eigenvalue_removed() {
        let r = repair_psd(&sym(2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        let expect = [1.0, 0.0, 0.0];
        for (a, b) in r.vech().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn indefinite_four_by_four() {
        let m = sym(
            4,
            &[
                2.0, -1.0, 0.5, 3.0, -1.0, 1.0, 2.0, 0.0, 0.5, 2.0, -3.0, 1.0, 3.0, 0.0, 1.0, 0.5,
            ],
        );
        let r = repair_psd(&m).unwrap();
        assert!(min_eigenvalue(&r).unwrap() >= -1e-12);
        // Agrees with the input on every positive eigenvector.
        let eig = SymmetricEigen::new(m.to_full());
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            let q = eig.eigenvectors.column(k).into_owned();
            let rq = r.to_full() * &q;
            let expect = if l > 0.0 { q * l } else { q * 0.0 };
            assert!((rq - expect).amax() < 1e-12);
        }
    }
}
