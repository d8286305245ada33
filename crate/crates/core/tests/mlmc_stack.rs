//! End-to-end checks of the multilevel stack on synthetic coupled levels.

use hcov_core::mlmc::{
    allocate_samples, mc_sample_count, mlmc_mean, mlmc_variance_h2, telescope, total_cost,
    LevelVariance,
};
use hcov_core::moments::{classical_level_bound, h11, h2, var_zl_unbiased, z_l, PowerSums1, PowerSums2, PowerSums4};
use hcov_core::oracle::{central_moments4, quadrivariate_fixture, DiscreteDistribution};

/// Coupled fine/coarse model on three conductivity-like atoms: atom `w`
/// gives fine values `(w, w^2 / 4)` and coarse values `(0.9 w, 0.2 w^2)`.
fn coupled_model() -> DiscreteDistribution {
    let atoms = [0.5, 1.0, 2.5]
        .iter()
        .map(|&w| vec![w, 0.25 * w * w, 0.9 * w, 0.2 * w * w])
        .collect();
    DiscreteDistribution::new(atoms, vec![0.2, 0.5, 0.3]).unwrap()
}

#[test]
fn full_estimator_is_unbiased_by_enumeration() {
    let d = coupled_model();
    let m = central_moments4(&d).unwrap();
    let atoms = d.atoms();
    let probs = d.probs();
    let k = atoms.len();
    let (n0, n1) = (4u32, 4u32);
    let tuples0 = k.pow(n0);
    let tuples1 = k.pow(n1);
    let mut expectation = 0.0;
    for t0 in 0..tuples0 {
        let mut p0 = 1.0;
        let mut level0 = PowerSums2::new();
        let mut rest = t0;
        for _ in 0..n0 {
            let a = &atoms[rest % k];
            p0 *= probs[rest % k];
            level0.push(a[2], a[3]).unwrap();
            rest /= k;
        }
        let base = h11(&level0).unwrap();
        for t1 in 0..tuples1 {
            let mut p1 = 1.0;
            let mut level1 = PowerSums4::new();
            let mut rest = t1;
            for _ in 0..n1 {
                let a = &atoms[rest % k];
                p1 *= probs[rest % k];
                level1.push([a[0], a[1], a[2], a[3]]).unwrap();
                rest /= k;
            }
            let est = telescope(&[vec![base], vec![z_l(&level1).unwrap()]]).unwrap();
            expectation += p0 * p1 * est.vech()[0];
        }
    }
    assert!((expectation - m.m1100).abs() <= 1e-12 * m.m1100.abs(), "{expectation} vs {}", m.m1100);
}

#[test]
fn perfectly_coupled_levels_telescope_to_single_level() {
    let fine: Vec<[f64; 2]> = (0..12).map(|k| [k as f64 * 0.3, (k * k) as f64 * 0.1]).collect();
    let base = PowerSums2::from_pairs(&fine.iter().map(|r| (r[0], r[1])).collect::<Vec<_>>()).unwrap();
    let mut levels = vec![vec![h11(&base).unwrap()]];
    for _ in 1..4 {
        let q: Vec<[f64; 4]> = fine.iter().map(|r| [r[0], r[1], r[0], r[1]]).collect();
        let ps = PowerSums4::from_quads(&q).unwrap();
        assert!(z_l(&ps).unwrap().abs() < 1e-13);
        assert!(var_zl_unbiased(&ps).unwrap().abs() < 1e-12);
        levels.push(vec![z_l(&ps).unwrap()]);
    }
    let t = telescope(&levels).unwrap();
    assert!((t.vech()[0] - h11(&base).unwrap()).abs() < 1e-12);
}

#[test]
fn mean_and_variance_stacks() {
    let u = [1.0, 2.5, 4.0, 3.0, 0.5];
    let single = PowerSums2::from_pairs(&u.iter().map(|&x| (x, x)).collect::<Vec<_>>()).unwrap();
    let (var, err) = mlmc_variance_h2(&[LevelVariance::from_sums(&[single]).unwrap()]).unwrap();
    let ps1 = PowerSums1::from_values(&u).unwrap();
    assert!((var[0] - h2(&ps1).unwrap()).abs() < 1e-12);
    assert!(err[0].is_finite());
    let coupled = PowerSums2::from_pairs(&u.iter().map(|&x| (2.0 * x, 0.0)).collect::<Vec<_>>()).unwrap();
    let lv = LevelVariance::from_sums(&[coupled]).unwrap();
    assert_eq!(lv.dh2, vec![0.0]);
    assert_eq!(mlmc_mean(&[vec![2.2], vec![0.0]]).unwrap(), vec![2.2]);
}

#[test]
fn classical_bound_dominates_on_the_fixture() {
    let d = quadrivariate_fixture();
    let rows: Vec<[f64; 4]> = (0..60).map(|k| {
        let a = &d.atoms()[k % 3];
        [a[0], a[1], a[2], a[3]]
    }).collect();
    let ps = PowerSums4::from_quads(&rows).unwrap();
    let n = ps.n();
    let node = |a: usize, b: usize, sign: f64| {
        PowerSums1::from_values(&rows.iter().map(|r| r[a] + sign * r[b]).collect::<Vec<_>>()).unwrap()
    };
    let bound = classical_level_bound(&node(0, 2, 1.0), &node(0, 2, -1.0), &node(1, 3, 1.0), &node(1, 3, -1.0), n)
        .unwrap();
    assert!(var_zl_unbiased(&ps).unwrap() < bound);
}

#[test]
fn allocation_examples() {
    assert_eq!(allocate_samples(0.01, &[vec![1.0]], &[1.0]).unwrap(), vec![100]);
    assert_eq!(allocate_samples(0.01, &[vec![1.0], vec![0.0]], &[1.0, 2.0]).unwrap()[1], 4);
    assert_eq!(mc_sample_count(1e-3, &[1.0, 84.582, 3.0]).unwrap(), 84582);
    assert_eq!(mc_sample_count(1e-3, &[0.0, 0.0]).unwrap(), 4);
    assert_eq!(mc_sample_count(0.5, &[1.0]).unwrap(), 4);
    assert_eq!(total_cost(&[100], &[2.0]).unwrap(), 200.0);
    let smaller = allocate_samples(1e-3, &[vec![50.0, 40.0], vec![0.5, 0.2]], &[1.0, 8.0]).unwrap();
    let larger = allocate_samples(1e-3, &[vec![50.0, 40.0], vec![0.6, 0.2]], &[1.0, 8.0]).unwrap();
    assert!(smaller.iter().zip(&larger).all(|(a, b)| a <= b));
}
