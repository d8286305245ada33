//! Oracles for the stochastic heat model: closed-form solutions, exact
//! coupling in the deterministic limit, symmetry and analytic covariance.

use hcov_core::experiment::{run_screening, RunConfig};
use hcov_core::mlmc::vech_index;
use hcov_core::model::{
    build_hierarchy, coupled_sample, generate_level_accumulators, interpolate_to_finest,
    sample_kappa, solve_heat, EntrySet, HeatProblem, SampleSeed,
};
use hcov_core::moments::{h11, PowerSums2};
use hcov_core::oracle::replicated_expectation;
use hcov_core::rng::{sample_rng, Stream};

#[test]
fn nodal_values_match_closed_form_on_every_level() {
    let p = HeatProblem::default();
    for e0 in [2, 3, 8] {
        let hier = build_hierarchy(&p, e0, 5).unwrap();
        for lv in &hier.levels {
            assert_eq!(lv.elements, e0 << lv.l);
            for kappa in [0.05, 0.1, 0.2] {
                let u = solve_heat(&p, lv, kappa).unwrap();
                assert_eq!(u[0], 273.0);
                assert_eq!(u[lv.elements], 273.0);
                for (v, &x) in u.iter().zip(&lv.coords) {
                    let exact = p.exact_solution(x, kappa);
                    assert!((v - exact).abs() <= 1e-9 * exact, "E0={e0} l={} x={x}", lv.l);
                }
            }
        }
    }
}

#[test]
fn center_value_and_linear_scaling() {
    let p = HeatProblem::default();
    let mesh = &build_hierarchy(&p, 8, 0).unwrap().levels[0];
    assert!((solve_heat(&p, mesh, 0.1).unwrap()[4] - 279.25).abs() < 1e-10);
    let a = solve_heat(&p, mesh, 0.1).unwrap();
    let b = solve_heat(&p, mesh, 0.2).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(((x - 273.0) - 2.0 * (y - 273.0)).abs() < 1e-10);
    }
}

#[test]
fn interpolation_examples() {
    let p = HeatProblem::default();
    let hier = build_hierarchy(&p, 2, 1).unwrap();
    assert_eq!(interpolate_to_finest(&[0.0, 4.0, 0.0], 0, &hier).unwrap(), vec![0.0, 2.0, 4.0, 2.0, 0.0]);
    let fine = vec![1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(interpolate_to_finest(&fine, 1, &hier).unwrap(), fine);
    let hier = build_hierarchy(&p, 4, 3).unwrap();
    let line: Vec<f64> = hier.levels[0].coords.iter().map(|x| 2.0 - 3.0 * x).collect();
    let up = interpolate_to_finest(&line, 0, &hier).unwrap();
    for (v, x) in up.iter().zip(&hier.finest_level().coords) {
        assert!((v - (2.0 - 3.0 * x)).abs() < 1e-14);
    }
}

#[test]
fn kappa_draws_have_the_configured_moments() {
    let p = HeatProblem::default();
    let n = 1_000_000u64;
    let mut rng = sample_rng(11, Stream::Replication, 0, 0);
    let mut sum = 0.0;
    let mut sq = 0.0;
    for _ in 0..n {
        let k = sample_kappa(&p, &mut rng);
        assert!(k > 0.0);
        sum += k;
        sq += k * k;
    }
    let mean = sum / n as f64;
    let std = (sq / n as f64 - mean * mean).sqrt();
    assert!((mean - 0.1).abs() <= 3.0 * 0.03 / 1000.0, "mean {mean}");
    assert!((std - 0.03).abs() < 1e-3, "std {std}");
    let fixed = HeatProblem { kappa_std: 0.0, ..p };
    assert_eq!(sample_kappa(&fixed, &mut rng), 0.1);
}

#[test]
fn deterministic_limit_couples_levels_exactly() {
    let p = HeatProblem { kappa_std: 0.0, ..HeatProblem::default() };
    let hier = build_hierarchy(&p, 8, 3).unwrap();
    for l in 1..=3 {
        let pair = coupled_sample(&p, &hier, l, SampleSeed { run_seed: 1, stream: Stream::Mc, index: 0 }).unwrap();
        let coarse = pair.u_coarse.as_ref().unwrap();
        for (k, &c) in coarse.iter().enumerate() {
            assert!((pair.u_fine[2 * k] - c).abs() <= 1e-9, "l={l} node {k}");
        }
        let field =
            generate_level_accumulators(&p, &hier, l, true, 0..16, 1, Stream::Mc, &EntrySet::Full).unwrap();
        let s = field.summarize().unwrap();
        assert!(s.z_vech.iter().all(|z| z.abs() <= 1e-9));
        assert!(s.v_vech.iter().all(|v| v.abs() <= 1e-9));
        assert!(s.variance.dh2.iter().all(|v| v.abs() <= 1e-9));
    }
}

#[test]
fn covariance_is_mirror_symmetric() {
    let p = HeatProblem::default();
    let hier = build_hierarchy(&p, 8, 2).unwrap();
    let m = hier.finest_level().nodes;
    let field = generate_level_accumulators(&p, &hier, 2, false, 0..400, 5, Stream::Mc, &EntrySet::Full).unwrap();
    let s = field.summarize().unwrap();
    for (i, j) in [(3, 1), (10, 7), (16, 2), (30, 29)] {
        let a = s.z_vech[vech_index(m, i, j)];
        let b = s.z_vech[vech_index(m, m - 1 - i, m - 1 - j)];
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12), "({i},{j}) {a} {b}");
    }
    let mean = &s.mean_y;
    for k in 0..m {
        assert!((mean[k] - mean[m - 1 - k]).abs() <= 1e-9);
    }
}

#[test]
fn screening_quantities_decay_beyond_level_zero() {
    let s = run_screening(&RunConfig::default()).unwrap();
    let upper = &s.report.levels[1..];
    for w in upper.windows(2) {
        assert!(w[1].max_abs_z < w[0].max_abs_z, "max|Z| at l={}", w[1].l);
        assert!(w[1].max_v < w[0].max_v, "max V at l={}", w[1].l);
    }
}

#[test]
fn replicated_covariance_matches_closed_form() {
    let p = HeatProblem::default();
    let hier = build_hierarchy(&p, 8, 2).unwrap();
    let x = &hier.finest_level().coords;
    let (i, j) = (16, 9);
    let n = 40u64;
    let rep = replicated_expectation(
        400,
        |r| {
            let mut ps = PowerSums2::new();
            for k in 0..n {
                let seed = SampleSeed { run_seed: 3, stream: Stream::Replication, index: r as u64 * n + k };
                let u = coupled_sample(&p, &hier, 2, seed)?.u_fine;
                ps.push(u[i], u[j])?;
            }
            Ok(ps)
        },
        h11,
    )
    .unwrap();
    let exact = p.exact_covariance(x[i], x[j]);
    assert!((rep.mean - exact).abs() <= 3.0 * rep.stderr, "{} +- {} vs {exact}", rep.mean, rep.stderr);
}
