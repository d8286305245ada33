//! Command-line driver: configuration ingestion, the screening, estimate,
//! compare and oracle workflows, and report files.

use clap::{Args, Parser, Subcommand};
use hcov_core::experiment::{
    run_compare, run_estimate, run_screening, CompareReport, CostModel, EstimatorKind,
    EstimatorReport, RunConfig,
};
use hcov_core::oracle::{certify, Check, Estimators};
use hcov_core::Error;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "HCOV_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hcov", version, about = "Unbiased MC and MLMC covariance estimation for the 1D stochastic heat equation")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `run_seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; overrides `out_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// `synthetic` or `measured`; overrides `cost_model`.
    #[arg(long, global = true, value_parser = parse_cost_model)]
    pub cost_model: Option<CostModel>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pilot run over all levels with rate fits.
    Screening,
    /// One estimator at one accuracy.
    Estimate {
        /// `hstat-mlmc`, `classical-mlmc` or `mc`.
        #[arg(long, value_parser = parse_estimator)]
        estimator: EstimatorKind,
        #[arg(long, allow_negative_numbers = true)]
        eps2_half: f64,
    },
    /// All three estimators at each accuracy, with costs and speedups.
    Compare {
        /// Comma-separated accuracies; defaults to the configured list.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eps2_half: Vec<f64>,
    },
    /// Exact-enumeration certification of every estimator.
    Oracle,
}

fn parse_cost_model(s: &str) -> Result<CostModel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_estimator(s: &str) -> Result<EstimatorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed command with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure { code: EXIT_NUMERIC, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::config(e.to_string())
        } else {
            Failure::numeric(e.to_string())
        }
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli, &Estimators::default()) {
        Ok(summary) => {
            print!("{summary}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command with the given estimators in a pool sized by
/// [`WORKERS_ENV`]. Returns the text printed on success.
pub fn run_cli(cli: &Cli, estimators: &Estimators) -> Result<String, Failure> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::numeric(e.to_string()))?;
    pool.install(|| execute(cli, estimators))
}

/// Reads the configuration file, if any, and applies command-line overrides.
pub fn load_config(global: &GlobalArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &global.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.run_seed = seed;
    }
    if let Some(cm) = global.cost_model {
        cfg.cost_model = cm;
    }
    if let Some(out) = &global.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli, estimators: &Estimators) -> Result<String, Failure> {
    let cfg = load_config(&cli.global)?;
    let out = PathBuf::from(&cfg.out_dir);
    let mut text = String::new();
    match &cli.command {
        Command::Screening => {
            let s = run_screening(&cfg)?;
            write_json(&out, "screening.json", &s.report)?;
            write_csv(&out, "screening_levels.csv", &s.report.levels)?;
            for lv in &s.report.levels {
                let _ = writeln!(
                    text,
                    "level {}: E={} max|Z|={:.4e} maxV={:.4e} maxVcov={:.4e} C={:.4e}",
                    lv.l, lv.elements, lv.max_abs_z, lv.max_v, lv.max_v_classical, lv.cost
                );
            }
            match (&s.report.fit, &s.report.diagnostic) {
                (Some(f), _) => {
                    let _ = writeln!(
                        text,
                        "alpha={:.3} beta={:.3} beta*={:.3} gamma={:.3} regime {} hypothesis {}",
                        f.alpha,
                        f.beta,
                        f.beta_star,
                        f.gamma,
                        serde_json::to_string(&f.regime).unwrap_or_default(),
                        if f.hypothesis_holds { "holds" } else { "fails" }
                    );
                }
                (None, Some(d)) => {
                    let _ = writeln!(text, "no rate fit: {d}");
                }
                (None, None) => {}
            }
        }
        Command::Estimate { estimator, eps2_half } => {
            if !(*eps2_half > 0.0 && eps2_half.is_finite()) {
                return Err(Failure::config(format!("--eps2-half must be positive, got {eps2_half}")));
            }
            let s = run_screening(&cfg)?;
            let r = run_estimate(&cfg, &s, *estimator, *eps2_half)?;
            write_estimate(&out, &r)?;
            let _ = writeln!(
                text,
                "{} eps2_half={:e}: N={:?} cost={:.6e} achieved={:.4e} target {} center mean {:.4} K",
                r.estimator,
                r.eps2_half,
                r.sample_counts(),
                r.total_cost,
                r.achieved_error,
                if r.target_met { "met" } else { "missed" },
                r.center_mean
            );
        }
        Command::Compare { eps2_half } => {
            let eps = if eps2_half.is_empty() { cfg.eps2_half.clone() } else { eps2_half.clone() };
            if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return Err(Failure::config("--eps2-half values must be positive"));
            }
            let s = run_screening(&cfg)?;
            let (report, estimates) = run_compare(&cfg, &s, &eps)?;
            write_compare(&out, &report, &estimates)?;
            for row in &report.rows {
                let _ = writeln!(
                    text,
                    "eps2_half={:e}: cost hstat={:.4e} classical={:.4e} mc={:.4e} speedup {:.2}x (vs classical {:.3}x) rel.diff {:.3}%",
                    row.eps2_half,
                    row.cost_hstat,
                    row.cost_classical,
                    row.cost_mc,
                    row.speedup_hstat_vs_mc,
                    row.speedup_hstat_vs_classical,
                    100.0 * row.rel_diff_cov_hstat
                );
            }
        }
        Command::Oracle => {
            let checks = certify(estimators)?;
            write_json(&out, "oracle.json", &checks)?;
            text.push_str(&oracle_table(&checks));
            if checks.iter().any(|c| !c.passed) {
                return Err(Failure { code: EXIT_ORACLE, message: format!("oracle checks failed\n{text}") });
            }
        }
    }
    let _ = writeln!(text, "reports written to {}", out.display());
    Ok(text)
}

/// Fixed-width pass/fail table.
pub fn oracle_table(checks: &[Check]) -> String {
    let mut s = format!("{:<48} {:>24} {:>24} {}\n", "check", "expected", "actual", "result");
    for c in checks {
        let _ = writeln!(
            s,
            "{:<48} {:>24.16e} {:>24.16e} {}",
            c.name,
            c.expected,
            c.actual,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(s, "{} checks, {} failed", checks.len(), failed);
    s
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::numeric(format!("cannot write {}: {e}", path.display()))
}

/// Writes `value` as pretty JSON to `dir/name`.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    let mut body = serde_json::to_string_pretty(value).map_err(|e| io_failure(&path, e))?;
    body.push('\n');
    fs::write(&path, body).map_err(|e| io_failure(&path, e))
}

/// Writes one CSV row per element of `rows` to `dir/name`.
pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_failure(&path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_failure(&path, e))?;
    }
    w.flush().map_err(|e| io_failure(&path, e))
}

/// File stem of an estimate report, e.g. `estimate_mc_1e-3`.
pub fn estimate_stem(r: &EstimatorReport) -> String {
    format!("estimate_{}_{:e}", r.estimator, r.eps2_half)
}

#[derive(Serialize)]
struct NodeRow {
    x: f64,
    mean: f64,
    mean_error: f64,
    variance: f64,
    variance_error: f64,
}

fn write_estimate(dir: &Path, r: &EstimatorReport) -> Result<(), Failure> {
    let stem = estimate_stem(r);
    write_json(dir, &format!("{stem}.json"), r)?;
    write_csv(dir, &format!("{stem}_levels.csv"), &r.levels)?;
    let nodes: Vec<NodeRow> = (0..r.nodes.len())
        .map(|k| NodeRow {
            x: r.nodes[k],
            mean: r.mean[k],
            mean_error: r.mean_error[k],
            variance: r.variance[k],
            variance_error: r.variance_error[k],
        })
        .collect();
    write_csv(dir, &format!("{stem}_nodes.csv"), &nodes)
}

#[derive(Serialize)]
struct CompareCsvRow {
    eps2_half: f64,
    estimator: EstimatorKind,
    total_cost: f64,
    achieved_error: f64,
    speedup_vs_mc: f64,
    rel_diff_cov_vs_mc: f64,
}

#[derive(Serialize)]
struct CompareLevelRow {
    eps2_half: f64,
    estimator: EstimatorKind,
    l: usize,
    n: usize,
    cost_per_sample: f64,
}

fn write_compare(dir: &Path, report: &CompareReport, estimates: &[EstimatorReport]) -> Result<(), Failure> {
    write_json(dir, "compare.json", report)?;
    let mut rows = Vec::new();
    for row in &report.rows {
        for (kind, cost, achieved, speedup, rel) in [
            (EstimatorKind::HstatMlmc, row.cost_hstat, row.achieved_hstat, row.speedup_hstat_vs_mc, row.rel_diff_cov_hstat),
            (
                EstimatorKind::ClassicalMlmc,
                row.cost_classical,
                row.achieved_classical,
                row.speedup_classical_vs_mc,
                row.rel_diff_cov_classical,
            ),
            (EstimatorKind::Mc, row.cost_mc, row.achieved_mc, 1.0, 0.0),
        ] {
            rows.push(CompareCsvRow {
                eps2_half: row.eps2_half,
                estimator: kind,
                total_cost: cost,
                achieved_error: achieved,
                speedup_vs_mc: speedup,
                rel_diff_cov_vs_mc: rel,
            });
        }
    }
    write_csv(dir, "compare.csv", &rows)?;
    let levels: Vec<CompareLevelRow> = estimates
        .iter()
        .flat_map(|r| {
            r.levels.iter().map(move |lv| CompareLevelRow {
                eps2_half: r.eps2_half,
                estimator: r.estimator,
                l: lv.l,
                n: lv.n,
                cost_per_sample: lv.cost_per_sample,
            })
        })
        .collect();
    write_csv(dir, "compare_levels.csv", &levels)
}
