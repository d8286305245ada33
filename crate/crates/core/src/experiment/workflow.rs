use super::config::{CostModel, EstimatorKind, RunConfig};
use super::report::{
    CompareReport, CompareRow, EstimateLevel, EstimatorReport, ScreeningLevel, ScreeningReport,
};
use crate::error::{Error, Result};
use crate::mlmc::{
    allocate_samples, fit_rates, mc_sample_count, min_eigenvalue, mlmc_mean, mlmc_variance_h2,
    repair_psd, sampling_error, telescope, total_cost, LevelScreen, LevelVariance, SymCovMatrix,
};
use crate::model::{
    build_hierarchy, coupled_sample, generate_level_accumulators, EntrySet, LevelField,
    LevelSummary, MeshHierarchy, SampleSeed,
};
use crate::rng::Stream;
use std::time::Instant;

/// Screening output plus the per-entry data the estimators allocate from.
#[derive(Clone, Debug)]
pub struct Screening {
    pub report: ScreeningReport,
    pub hierarchy: MeshHierarchy,
    pub costs: Vec<f64>,
    /// `V_{l,1,1}` per level and entry.
    pub v_hstat: Vec<Vec<f64>>,
    /// `V_{l,cov}` per level and entry.
    pub v_classical: Vec<Vec<f64>>,
    /// `V_{1,1}` of the finest-level fine values per entry.
    pub v_mc: Vec<f64>,
}

pub fn hierarchy(cfg: &RunConfig) -> Result<MeshHierarchy> {
    cfg.validate()?;
    build_hierarchy(&cfg.problem, cfg.e0, cfg.levels)
}

/// Average wall-clock seconds of one coupled sample of level `l`.
pub fn measure_cost(cfg: &RunConfig, hier: &MeshHierarchy, l: usize, samples: usize) -> Result<f64> {
    let start = Instant::now();
    for index in 0..samples as u64 {
        let seed = SampleSeed { run_seed: cfg.run_seed, stream: Stream::Screening, index };
        let pair = coupled_sample(&cfg.problem, hier, l, seed)?;
        std::hint::black_box(pair.on_finest(hier)?);
    }
    Ok(start.elapsed().as_secs_f64() / samples.max(1) as f64)
}

/// Per-sample cost of every level under the configured cost model.
pub fn level_costs(cfg: &RunConfig, hier: &MeshHierarchy) -> Result<Vec<f64>> {
    hier.levels
        .iter()
        .map(|lv| match cfg.cost_model {
            CostModel::Synthetic => Ok(cfg.cost_per_element * lv.elements as f64),
            CostModel::Measured => measure_cost(cfg, hier, lv.l, cfg.screening_samples),
        })
        .collect()
}

fn vmax(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Fixed-sample pilot run over all levels with rate fits.
pub fn run_screening(cfg: &RunConfig) -> Result<Screening> {
    let hier = hierarchy(cfg)?;
    let costs = level_costs(cfg, &hier)?;
    let n = cfg.screening_samples as u64;
    let mut levels = Vec::new();
    let mut screens = Vec::new();
    let (mut v_hstat, mut v_classical, mut v_mc) = (Vec::new(), Vec::new(), Vec::new());
    for lv in &hier.levels {
        let field = generate_level_accumulators(
            &cfg.problem,
            &hier,
            lv.l,
            lv.l > 0,
            0..n,
            cfg.run_seed,
            Stream::Screening,
            &EntrySet::Full,
        )?;
        let s = field.summarize()?;
        let screen = LevelScreen {
            l: lv.l,
            h: lv.h,
            max_abs_z: max_abs(&s.z_vech),
            max_v: vmax(&s.v_vech),
            max_v_classical: vmax(&s.v_cov_vech),
            cost: costs[lv.l],
        };
        levels.push(ScreeningLevel {
            l: lv.l,
            elements: lv.elements,
            h: lv.h,
            samples: s.n,
            max_abs_z: screen.max_abs_z,
            max_v: screen.max_v,
            max_v_classical: screen.max_v_classical,
            cost: screen.cost,
        });
        screens.push(screen);
        if lv.l == hier.finest() {
            v_mc = s.v_fine_vech.clone();
        }
        v_hstat.push(s.v_vech);
        v_classical.push(s.v_cov_vech);
    }
    let (fit, diagnostic) = if cfg.problem.kappa_std == 0.0 {
        (
            None,
            Some("degenerate data: kappa_std = 0, so every level difference vanishes and no rates can be fitted".to_string()),
        )
    } else {
        match fit_rates(&screens) {
            Ok(f) => (Some(f), None),
            Err(Error::Domain(msg)) => (None, Some(msg)),
            Err(e) => return Err(e),
        }
    };
    let report = ScreeningReport {
        run_seed: cfg.run_seed,
        e0: cfg.e0,
        finest_level: hier.finest(),
        samples: cfg.screening_samples,
        cost_model: cfg.cost_model,
        levels,
        fit,
        diagnostic,
        max_v_mc: vmax(&v_mc),
    };
    Ok(Screening { report, hierarchy: hier, costs, v_hstat, v_classical, v_mc })
}

fn stream_of(kind: EstimatorKind) -> Stream {
    match kind {
        EstimatorKind::HstatMlmc => Stream::HstatMlmc,
        EstimatorKind::ClassicalMlmc => Stream::ClassicalMlmc,
        EstimatorKind::Mc => Stream::Mc,
    }
}

fn driving_variance(kind: EstimatorKind, s: &LevelSummary) -> &[f64] {
    match kind {
        EstimatorKind::ClassicalMlmc => &s.v_cov_vech,
        EstimatorKind::HstatMlmc | EstimatorKind::Mc => &s.v_vech,
    }
}

fn allocate(kind: EstimatorKind, eps2_half: f64, v: &[Vec<f64>], c: &[f64]) -> Result<Vec<usize>> {
    match kind {
        EstimatorKind::Mc => Ok(vec![mc_sample_count(eps2_half, &v[0])?]),
        _ => allocate_samples(eps2_half, v, c),
    }
}

/// Allocates, samples and assembles one estimator at accuracy `eps2_half`.
///
/// The first allocation uses the screening variances. When the variances
/// re-estimated from the drawn samples show the target is missed, the
/// allocation is recomputed from them and the missing samples are added.
pub fn run_estimate(
    cfg: &RunConfig,
    screening: &Screening,
    kind: EstimatorKind,
    eps2_half: f64,
) -> Result<EstimatorReport> {
    if !(eps2_half > 0.0 && eps2_half.is_finite()) {
        return Err(Error::Config(format!("eps2_half must be positive, got {eps2_half}")));
    }
    let hier = &screening.hierarchy;
    let finest = hier.finest();
    let (level_ids, costs, v0): (Vec<usize>, Vec<f64>, Vec<Vec<f64>>) = match kind {
        EstimatorKind::Mc => (vec![finest], vec![screening.costs[finest]], vec![screening.v_mc.clone()]),
        EstimatorKind::HstatMlmc => ((0..=finest).collect(), screening.costs.clone(), screening.v_hstat.clone()),
        EstimatorKind::ClassicalMlmc => {
            ((0..=finest).collect(), screening.costs.clone(), screening.v_classical.clone())
        }
    };
    let stream = stream_of(kind);
    let mut n = allocate(kind, eps2_half, &v0, &costs)?;
    let mut fields: Vec<Option<LevelField>> = vec![None; level_ids.len()];
    let mut rounds = 0;
    let (summaries, achieved) = loop {
        rounds += 1;
        for (k, &l) in level_ids.iter().enumerate() {
            let have = fields[k].as_ref().map_or(0, |f| f.n()) as u64;
            let want = n[k] as u64;
            if want > have {
                let coupled = kind != EstimatorKind::Mc && l > 0;
                let part = generate_level_accumulators(
                    &cfg.problem,
                    hier,
                    l,
                    coupled,
                    have..want,
                    cfg.run_seed,
                    stream,
                    &EntrySet::Full,
                )?;
                match &mut fields[k] {
                    Some(f) => f.merge(part)?,
                    slot => *slot = Some(part),
                }
            }
        }
        let summaries = fields
            .iter()
            .map(|f| f.as_ref().expect("every level is sampled").summarize())
            .collect::<Result<Vec<_>>>()?;
        let v: Vec<Vec<f64>> = summaries.iter().map(|s| driving_variance(kind, s).to_vec()).collect();
        let achieved = sampling_error(&v, &n)?;
        if achieved <= eps2_half || rounds > cfg.max_topups {
            break (summaries, achieved);
        }
        let next = allocate(kind, eps2_half, &v, &costs)?;
        let grown: Vec<usize> = n.iter().zip(&next).map(|(a, b)| *a.max(b)).collect();
        if grown == n {
            break (summaries, achieved);
        }
        n = grown;
    };

    let raw = telescope(&summaries.iter().map(|s| s.z_vech.clone()).collect::<Vec<_>>())?;
    let min_eigenvalue_raw = min_eigenvalue(&raw)?;
    let covariance: SymCovMatrix = match kind {
        EstimatorKind::Mc => raw,
        _ => repair_psd(&raw)?,
    };
    let min_eig = min_eigenvalue(&covariance)?;
    let entries = covariance.vech().len();
    let standard_error_vech = (0..entries)
        .map(|e| {
            summaries
                .iter()
                .map(|s| driving_variance(kind, s)[e] / s.n as f64)
                .sum::<f64>()
                .max(0.0)
                .sqrt()
        })
        .collect();
    let mean = mlmc_mean(&summaries.iter().map(|s| s.mean_y.clone()).collect::<Vec<_>>())?;
    let nodes = hier.finest_level().nodes;
    let mean_error = (0..nodes)
        .map(|k| summaries.iter().map(|s| s.var_y[k] / s.n as f64).sum())
        .collect();
    let (variance, variance_error) =
        mlmc_variance_h2(&summaries.iter().map(|s| s.variance.clone()).collect::<Vec<LevelVariance>>())?;
    let levels = summaries
        .iter()
        .zip(&costs)
        .map(|(s, &c)| EstimateLevel {
            l: s.l,
            n: s.n,
            cost_per_sample: c,
            max_abs_z: max_abs(&s.z_vech),
            max_v: vmax(driving_variance(kind, s)),
        })
        .collect();
    let center_node = nodes / 2;
    Ok(EstimatorReport {
        estimator: kind,
        eps2_half,
        cost_model: cfg.cost_model,
        run_seed: cfg.run_seed,
        levels,
        total_cost: total_cost(&n, &costs)?,
        achieved_error: achieved,
        target_met: achieved <= eps2_half,
        rounds,
        nodes: hier.finest_level().coords.clone(),
        covariance,
        min_eigenvalue_raw,
        min_eigenvalue: min_eig,
        standard_error_vech,
        center_mean: mean[center_node],
        mean,
        mean_error,
        variance,
        variance_error,
        center_node,
    })
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// `||A - B||_F / ||B||_F`
pub fn relative_difference(a: &SymCovMatrix, b: &SymCovMatrix) -> f64 {
    (a.to_full() - b.to_full()).norm() / b.to_full().norm()
}

/// Largest pointwise relative difference of two mean fields.
pub fn max_relative_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| ((x - y) / y).abs()).fold(0.0, f64::max)
}

/// Builds one comparison row from the three estimator reports.
pub fn compare_row(hstat: &EstimatorReport, classical: &EstimatorReport, mc: &EstimatorReport) -> CompareRow {
    CompareRow {
        eps2_half: hstat.eps2_half,
        n_hstat: hstat.sample_counts(),
        n_classical: classical.sample_counts(),
        n_mc: mc.levels[0].n,
        cost_hstat: hstat.total_cost,
        cost_classical: classical.total_cost,
        cost_mc: mc.total_cost,
        achieved_hstat: hstat.achieved_error,
        achieved_classical: classical.achieved_error,
        achieved_mc: mc.achieved_error,
        speedup_hstat_vs_mc: mc.total_cost / hstat.total_cost,
        speedup_classical_vs_mc: mc.total_cost / classical.total_cost,
        speedup_hstat_vs_classical: classical.total_cost / hstat.total_cost,
        rel_diff_cov_hstat: relative_difference(&hstat.covariance, &mc.covariance),
        rel_diff_cov_classical: relative_difference(&classical.covariance, &mc.covariance),
        rel_diff_var_hstat: rel_l2(&hstat.variance, &mc.variance),
        rel_diff_var_classical: rel_l2(&classical.variance, &mc.variance),
        rel_diff_mean_hstat: max_relative_difference(&hstat.mean, &mc.mean),
        center_mean_hstat: hstat.center_mean,
        center_mean_mc: mc.center_mean,
    }
}

/// Runs all three estimators at every accuracy.
pub fn run_compare(
    cfg: &RunConfig,
    screening: &Screening,
    eps2_half: &[f64],
) -> Result<(CompareReport, Vec<EstimatorReport>)> {
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &eps in eps2_half {
        let h = run_estimate(cfg, screening, EstimatorKind::HstatMlmc, eps)?;
        let c = run_estimate(cfg, screening, EstimatorKind::ClassicalMlmc, eps)?;
        let m = run_estimate(cfg, screening, EstimatorKind::Mc, eps)?;
        rows.push(compare_row(&h, &c, &m));
        reports.extend([h, c, m]);
    }
    Ok((CompareReport { run_seed: cfg.run_seed, cost_model: cfg.cost_model, rows }, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig { e0: 4, levels: 2, screening_samples: 20, ..RunConfig::default() }
    }

    #[test]
    fn screening_shapes() {
        let s = run_screening(&small()).unwrap();
        assert_eq!(s.report.levels.len(), 3);
        assert_eq!(s.v_hstat[0].len(), 17 * 18 / 2);
        assert_eq!(s.costs, vec![4e-6, 8e-6, 16e-6]);
        assert!(s.report.fit.is_some());
    }

    #[test]
    fn degenerate_screening_reports_diagnostic() {
        let mut cfg = small();
        cfg.problem.kappa_std = 0.0;
        let s = run_screening(&cfg).unwrap();
        assert!(s.report.fit.is_none());
        assert!(s.report.diagnostic.is_some());
        for lv in &s.report.levels[1..] {
            assert!(lv.max_abs_z < 1e-10 && lv.max_v.abs() < 1e-10);
        }
    }

    #[test]
    fn estimate_meets_target() {
        let cfg = small();
        let s = run_screening(&cfg).unwrap();
        for kind in EstimatorKind::ALL {
            let r = run_estimate(&cfg, &s, kind, 0.05).unwrap();
            assert!(r.target_met, "{kind}: {}", r.achieved_error);
            assert!(r.achieved_error <= 0.05);
            if kind != EstimatorKind::Mc {
                assert!(r.min_eigenvalue >= -1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_target() {
        let cfg = small();
        let s = run_screening(&cfg).unwrap();
        assert!(run_estimate(&cfg, &s, EstimatorKind::Mc, 0.0).unwrap_err().is_config());
    }
}
