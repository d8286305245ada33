use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hcov_core::model::{
    build_hierarchy, generate_level_accumulators, reference_shift, solve_heat, EntrySet,
    HeatProblem, LevelField,
};
use hcov_core::moments::{var_h11_unbiased, var_zl_unbiased, PowerSums2, PowerSums4};
use hcov_core::rng::Stream;
use std::hint::black_box;

fn closed_forms(c: &mut Criterion) {
    let quads: Vec<[f64; 4]> = (0..64)
        .map(|k| {
            let t = k as f64 * 0.37;
            [t.sin(), t.cos(), (1.3 * t).sin(), (0.7 * t).cos()]
        })
        .collect();
    let ps4 = PowerSums4::from_quads(&quads).unwrap();
    let ps2 = ps4.pair(0, 1).unwrap();
    c.bench_function("var_zl_unbiased", |b| b.iter(|| var_zl_unbiased(black_box(&ps4))));
    c.bench_function("var_h11_unbiased", |b| b.iter(|| var_h11_unbiased(black_box(&ps2))));
    c.bench_function("power_sums4_push", |b| {
        b.iter(|| {
            let mut p = PowerSums4::new();
            for q in &quads {
                p.push(*q).unwrap();
            }
            black_box(p)
        })
    });
    c.bench_function("power_sums2_push", |b| {
        b.iter(|| {
            let mut p = PowerSums2::new();
            for q in &quads {
                p.push(q[0], q[1]).unwrap();
            }
            black_box(p)
        })
    });
}

fn heat_model(c: &mut Criterion) {
    let p = HeatProblem::default();
    let hier = build_hierarchy(&p, 8, 3).unwrap();
    let mut g = c.benchmark_group("solve_heat");
    for lv in &hier.levels {
        g.bench_with_input(BenchmarkId::from_parameter(lv.elements), lv, |b, lv| {
            b.iter(|| solve_heat(&p, black_box(lv), 0.1))
        });
    }
    g.finish();

    let shift = reference_shift(&p, &hier).unwrap();
    let fine = hier.finest_level().coords.iter().map(|x| p.exact_solution(*x, 0.09)).collect::<Vec<_>>();
    let coarse = hier.finest_level().coords.iter().map(|x| p.exact_solution(*x, 0.091)).collect::<Vec<_>>();
    c.bench_function("level_field_push_coupled", |b| {
        let mut f = LevelField::new(3, true, shift.clone(), EntrySet::Full).unwrap();
        b.iter(|| f.push(black_box(&fine), Some(&coarse)).unwrap())
    });
    c.bench_function("level_field_push_single", |b| {
        let mut f = LevelField::new(3, false, shift.clone(), EntrySet::Full).unwrap();
        b.iter(|| f.push(black_box(&fine), None).unwrap())
    });

    let mut g = c.benchmark_group("generate_level_accumulators");
    g.sample_size(10);
    for l in 0..=3 {
        g.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| {
                generate_level_accumulators(&p, &hier, l, l > 0, 0..1024, 7, Stream::Screening, &EntrySet::Full)
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, closed_forms, heat_model);
criterion_main!(benches);
