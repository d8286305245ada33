use clap::Parser;
use hcov_cli::{run, run_cli, Cli, EXIT_CONFIG, EXIT_OK, EXIT_ORACLE};
use hcov_core::moments::{quadrivariate_ansatz_coeffs, quadrivariate_ansatz_terms};
use hcov_core::oracle::Estimators;
use serde_json::Value;
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

const SMALL: &str = "e0 = 4\nlevels = 2\nscreening_samples = 20\neps2_half = 0.05\n";

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn hcov(args: &[&str]) -> i32 {
    run(std::iter::once("hcov").chain(args.iter().copied()))
}

/// Every key path of a JSON document; arrays contribute their first element.
fn key_paths(v: &Value, prefix: &str, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                out.insert(p.clone());
                key_paths(child, &p, out);
            }
        }
        Value::Array(items) => {
            if let Some(first) = items.first() {
                key_paths(first, &format!("{prefix}[]"), out);
            }
        }
        _ => {}
    }
}

fn schema_of(path: &Path) -> String {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let mut keys = BTreeSet::new();
    key_paths(&v, "", &mut keys);
    keys.into_iter().collect::<Vec<_>>().join("\n") + "\n"
}

fn assert_golden(report: &Path, golden: &str) {
    let expected = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(golden))
        .unwrap();
    assert_eq!(schema_of(report), expected, "schema of {} drifted", report.display());
}

#[test]
fn report_schemas_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    assert_eq!(hcov(&["screening", "--config", &cfg, "--out", out_s]), EXIT_OK);
    assert_eq!(hcov(&["estimate", "--estimator", "hstat-mlmc", "--eps2-half", "0.05", "--config", &cfg, "--out", out_s]), EXIT_OK);
    assert_eq!(hcov(&["compare", "--config", &cfg, "--out", out_s]), EXIT_OK);
    assert_eq!(hcov(&["oracle", "--out", out_s]), EXIT_OK);
    assert_golden(&out.join("screening.json"), "screening.keys");
    assert_golden(&out.join("estimate_hstat-mlmc_5e-2.json"), "estimate.keys");
    assert_golden(&out.join("compare.json"), "compare.keys");
    assert_golden(&out.join("oracle.json"), "oracle.keys");
    for csv in [
        "screening_levels.csv",
        "estimate_hstat-mlmc_5e-2_levels.csv",
        "estimate_hstat-mlmc_5e-2_nodes.csv",
        "compare.csv",
        "compare_levels.csv",
    ] {
        let text = fs::read_to_string(out.join(csv)).unwrap();
        assert!(text.lines().count() > 1, "{csv} has no rows");
    }
    let header = fs::read_to_string(out.join("screening_levels.csv")).unwrap();
    assert_eq!(
        header.lines().next().unwrap(),
        "l,elements,h,samples,max_abs_z,max_v,max_v_classical,cost"
    );
}

#[test]
fn identical_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let runs: Vec<_> = ["a", "b", "c"]
        .iter()
        .zip(["5", "5", "6"])
        .map(|(name, seed)| {
            let out = dir.path().join(name);
            let code = hcov(&["compare", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
            assert_eq!(code, EXIT_OK);
            fs::read(out.join("compare.json")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_ne!(runs[0], runs[2]);
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let cli = |out: &str| {
        Cli::try_parse_from(["hcov", "estimate", "--estimator", "mc", "--eps2-half", "0.05", "--config", &cfg, "--out", out])
            .unwrap()
    };
    let (a, b) = (dir.path().join("one"), dir.path().join("many"));
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    one.install(|| run_cli(&cli(a.to_str().unwrap()), &Estimators::default())).unwrap();
    run_cli(&cli(b.to_str().unwrap()), &Estimators::default()).unwrap();
    let name = "estimate_mc_5e-2.json";
    assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
}

#[test]
fn configuration_errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    let bad = write_config(dir.path(), "colour = red\n");
    assert_eq!(hcov(&["screening", "--config", &bad, "--out", out_s]), EXIT_CONFIG);
    let missing = dir.path().join("missing.cfg");
    assert_eq!(hcov(&["screening", "--config", missing.to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(hcov(&["estimate", "--estimator", "mlmc", "--eps2-half", "1e-3"]), EXIT_CONFIG);
    assert_eq!(hcov(&["estimate", "--estimator", "mc", "--eps2-half", "-1", "--out", out_s]), EXIT_CONFIG);
    assert_eq!(hcov(&["compare", "--eps2-half", "0", "--out", out_s]), EXIT_CONFIG);
    assert_eq!(hcov(&["screening", "--cost-model", "fast"]), EXIT_CONFIG);
    assert_eq!(hcov(&["frobnicate"]), EXIT_CONFIG);
    assert_eq!(hcov(&["--help"]), EXIT_OK);
}

#[test]
fn degenerate_screening_reports_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}kappa_std = 0\n"));
    let out = dir.path().join("out");
    assert_eq!(hcov(&["screening", "--config", &cfg, "--out", out.to_str().unwrap()]), EXIT_OK);
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("screening.json")).unwrap()).unwrap();
    assert!(v["fit"].is_null());
    assert!(v["diagnostic"].as_str().unwrap().contains("degenerate"));
}

/// Flips the sign of one term of the quadrivariate ansatz.
fn sign_flipped_var_zl(term: usize) -> Estimators {
    Estimators {
        var_zl: Box::new(move |ps| {
            let a = quadrivariate_ansatz_coeffs(ps.n())?;
            let t = quadrivariate_ansatz_terms(ps)?;
            Ok((0..10).map(|k| if k == term { -a[k] * t[k] } else { a[k] * t[k] }).sum())
        }),
        ..Estimators::default()
    }
}

#[test]
fn oracle_passes_and_detects_sign_flips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cli = Cli::try_parse_from(["hcov", "oracle", "--out", out.to_str().unwrap()]).unwrap();
    let start = std::time::Instant::now();
    let table = run_cli(&cli, &Estimators::default()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert!(table.contains(" 0 failed"));
    for term in 0..10 {
        let failure = run_cli(&cli, &sign_flipped_var_zl(term)).unwrap_err();
        assert_eq!(failure.code, EXIT_ORACLE, "term {term}");
        assert!(failure.message.contains("FAIL"));
    }
}
