use super::mesh::MeshLevel;
use super::problem::HeatProblem;
use crate::error::{Error, Result};

/// Linear finite elements for `-kappa u'' = f` with Dirichlet ends,
/// solved by the Thomas algorithm. Returns all nodal values.
pub fn solve_heat(problem: &HeatProblem, mesh: &MeshLevel, kappa: f64) -> Result<Vec<f64>> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("kappa must be positive, got {kappa}")));
    }
    let e = mesh.elements;
    let mut u = vec![problem.boundary_temp; e + 1];
    let unknowns = e - 1;
    if unknowns == 0 {
        return Ok(u);
    }
    let k = kappa / mesh.h;
    let (diag, off) = (2.0 * k, -k);
    let mut rhs = vec![problem.flux * mesh.h; unknowns];
    rhs[0] += k * problem.boundary_temp;
    rhs[unknowns - 1] += k * problem.boundary_temp;
    // Forward sweep on the constant tridiagonal system.
    let mut c = vec![0.0; unknowns];
    c[0] = off / diag;
    rhs[0] /= diag;
    for i in 1..unknowns {
        let m = diag - off * c[i - 1];
        c[i] = off / m;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
    }
    for i in (0..unknowns - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    u[1..e].copy_from_slice(&rhs);
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mesh::build_hierarchy;

    #[test]
    fn nodal_exactness() {
        let p = HeatProblem::default();
        let h = build_hierarchy(&p, 2, 6).unwrap();
        for mesh in &h.levels {
            for kappa in [0.05, 0.1, 0.2] {
                let u = solve_heat(&p, mesh, kappa).unwrap();
                for (v, &x) in u.iter().zip(&mesh.coords) {
                    let exact = p.exact_solution(x, kappa);
                    assert!((v - exact).abs() <= 1e-9 * exact.abs());
                }
            }
        }
    }

    #[test]
    fn examples() {
        let p = HeatProblem::default();
        let mesh = &build_hierarchy(&p, 8, 0).unwrap().levels[0];
        let u = solve_heat(&p, mesh, 0.1).unwrap();
        assert!((u[4] - 279.25).abs() < 1e-10);
        let cold = HeatProblem { flux: 0.0, ..p.clone() };
        assert!(solve_heat(&cold, mesh, 0.1).unwrap().iter().all(|&v| (v - 273.0).abs() < 1e-12));
        let u2 = solve_heat(&p, mesh, 0.2).unwrap();
        for (a, b) in u.iter().zip(&u2) {
            assert!((0.5 * (a - 273.0) - (b - 273.0)).abs() < 1e-10);
        }
        assert!(solve_heat(&p, mesh, 0.0).is_err());
        assert!(solve_heat(&p, mesh, f64::NAN).is_err());
    }
}
