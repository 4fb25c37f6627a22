//! The `smcsn` binary: output layouts, determinism and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use smcsn_link::numerics::std_normal_cdf;
use tempfile::TempDir;

const SHORT: [&str; 6] = ["--iters", "700", "--burnin", "400", "--thin", "3"];

fn smcsn(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_smcsn")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, stdout, stderr) = smcsn(args);
    assert_eq!(code, 0, "{args:?}\n{stderr}");
    stdout
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Simulated dataset written by the `simulate` command.
fn simulated(dir: &Path, n: usize, beta: &str, delta: &str, family: &str, shape: &[&str]) -> PathBuf {
    let out = dir.join(format!("sim-{family}-{n}"));
    let n = n.to_string();
    let mut args = vec!["simulate", "--n", &n, "--beta", beta, "--delta", delta, "--family", family];
    let joined = shape.join(",");
    if !shape.is_empty() {
        args.extend(["--shape", &joined]);
    }
    args.extend(["--seed", "4", "--out", p(&out)]);
    ok(&args);
    out.join("data.csv")
}

/// Data rows of a `#`-headed CSV, header included.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn simulate_writes_dataset_and_truth() {
    let tmp = TempDir::new().unwrap();
    let data = simulated(tmp.path(), 200, "1,2", "0.99", "csn", &[]);
    let table = rows(&data);
    assert_eq!(table[0], ["y", "x1"]);
    assert_eq!(table.len(), 201);
    assert!(table[1..].iter().all(|r| r[0] == "0" || r[0] == "1"));
    let truth: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(data.with_file_name("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["seed"], 4);
    assert_eq!(truth["delta"], 0.99);
    assert_eq!(truth["beta"], serde_json::json!([1.0, 2.0]));

    let again = simulated(&tmp.path().join("again"), 200, "1,2", "0.99", "csn", &[]);
    assert_eq!(fs::read(&data).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn balanced_probit_simulation() {
    let tmp = TempDir::new().unwrap();
    let n = 4000;
    let data = simulated(tmp.path(), n, "0,0", "0", "probit", &[]);
    let ones = rows(&data)[1..].iter().filter(|r| r[0] == "1").count();
    let frac = ones as f64 / n as f64;
    assert!((frac - 0.5).abs() <= 4.0 * (0.25 / n as f64).sqrt(), "{frac}");
}

fn summary_names(path: &Path) -> Vec<String> {
    rows(path)[1..].iter().map(|r| r[0].clone()).collect()
}

#[test]
fn summary_columns_follow_the_family() {
    let tmp = TempDir::new().unwrap();
    let data = simulated(tmp.path(), 150, "1,2", "0.9", "cscn", &["0.7", "0.7"]);
    for (family, want) in [
        ("probit", vec!["beta0", "beta1", "g"]),
        ("csn", vec!["beta0", "beta1", "delta", "g"]),
        ("cst", vec!["beta0", "beta1", "delta", "nu", "g"]),
        ("cscn", vec!["beta0", "beta1", "delta", "nu1", "nu2", "g"]),
    ] {
        let out = tmp.path().join(family);
        let mut args = vec!["fit", "--data", p(&data), "--family", family, "--sign", "pos", "--out", p(&out)];
        args.extend(SHORT);
        ok(&args);
        assert_eq!(summary_names(&out.join("summary.csv")), want, "{family}");
        assert_eq!(
            rows(&out.join("summary.csv"))[0],
            ["parameter", "mean", "median", "mode", "hpd_lower", "hpd_upper", "recommended", "estimate"]
        );
        let draws = rows(&out.join("draws.csv"));
        assert_eq!(draws.len(), 101);
        assert_eq!(draws[0][1..], want[..]);
    }
}

#[test]
fn auto_sign_is_recorded_and_reruns_are_identical() {
    let tmp = TempDir::new().unwrap();
    let data = simulated(tmp.path(), 200, "1,2", "-0.99", "csn", &[]);
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let mut args = vec!["fit", "--data", p(&data), "--family", "csn", "--sign", "auto", "--seed", "9"];
        args.extend(["--out", p(&out)]);
        args.extend(SHORT);
        ok(&args);
        out
    };
    let a = run("a");
    let b = run("b");
    for f in ["draws.csv", "summary.csv", "meta.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["sign_region"], "neg");
    assert_eq!(meta["sign_selection"]["sign"], -1);
    let digest = meta["manifest_sha256"].as_str().unwrap();
    let draws = fs::read_to_string(a.join("draws.csv")).unwrap();
    assert!(draws.lines().any(|l| l == format!("# manifest sha256:{digest}")));
    assert!(draws.lines().any(|l| l == "# seed 9"));

    // A different seed is a different manifest.
    let out = tmp.path().join("c");
    let mut args = vec!["fit", "--data", p(&data), "--family", "csn", "--sign", "neg", "--seed", "10"];
    args.extend(["--out", p(&out)]);
    args.extend(SHORT);
    ok(&args);
    let other: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_ne!(other["manifest_sha256"].as_str().unwrap(), digest);
}

#[test]
fn probit_predictions_average_normal_cdf() {
    let tmp = TempDir::new().unwrap();
    let data = simulated(tmp.path(), 120, "0.3,-1", "0", "probit", &[]);
    let out = tmp.path().join("pred");
    let mut args = vec!["predict", "--data", p(&data), "--family", "probit", "--out", p(&out)];
    args.extend(SHORT);
    ok(&args);
    assert!(!out.join("draws.csv").exists(), "predict writes only its own table");
    let table = rows(&out.join("predictions.csv"));
    assert_eq!(table[0], ["row", "eta", "prob", "lower", "upper"]);

    // Refit with `fit` (same manifest apart from the command) to recover
    // the draws behind the predictions.
    let fit = tmp.path().join("fit");
    let mut args = vec!["fit", "--data", p(&data), "--family", "probit", "--out", p(&fit)];
    args.extend(SHORT);
    ok(&args);
    let draws: Vec<(f64, f64)> = rows(&fit.join("draws.csv"))[1..]
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    let xs: Vec<f64> = rows(&data)[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    for (i, x) in xs.iter().enumerate() {
        let want = draws.iter().map(|(b0, b1)| std_normal_cdf(b0 + b1 * x)).sum::<f64>() / draws.len() as f64;
        let got: f64 = table[i + 1][2].parse().unwrap();
        assert!((got - want).abs() < 1e-12, "row {i}: {got} vs {want}");
    }
}

#[test]
fn residual_envelope_on_well_specified_data() {
    let tmp = TempDir::new().unwrap();
    let data = simulated(tmp.path(), 250, "1,2", "0.99", "csn", &[]);
    let out = tmp.path().join("res");
    let args = [
        "residuals", "--data", p(&data), "--family", "csn", "--sign", "pos", "--iters", "2500", "--burnin", "1500",
        "--thin", "5", "--out", p(&out),
    ];
    ok(&args);
    let table = rows(&out.join("envelope.csv"));
    assert_eq!(table[0], ["theoretical", "observed", "lower", "upper"]);
    let inside = table[1..]
        .iter()
        .filter(|r| {
            let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
            v[2] <= v[1] && v[1] <= v[3]
        })
        .count();
    assert!(inside as f64 >= 0.9 * 250.0, "{inside} of 250 inside");
}

#[test]
fn link_curve_and_sign_select_outputs() {
    let tmp = TempDir::new().unwrap();
    let data = simulated(tmp.path(), 150, "1,2", "0.9", "csn", &[]);
    let out = tmp.path().join("curve");
    let mut args = vec!["link-curve", "--data", p(&data), "--sign", "pos", "--points", "21", "--out", p(&out)];
    args.extend(SHORT);
    ok(&args);
    let table = rows(&out.join("curve.csv"));
    assert_eq!(table[0], ["eta", "mean", "lower", "upper"]);
    assert_eq!(table.len(), 22);
    let means: Vec<f64> = table[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1]));

    let out = tmp.path().join("sign");
    let mut args = vec!["sign-select", "--data", p(&data), "--statistic", "median", "--out", p(&out)];
    args.extend(SHORT);
    let stdout = ok(&args);
    assert!(stdout.starts_with("sign "), "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("sign.json")).unwrap()).unwrap();
    assert_eq!(report["selection"]["statistic"], "median");
    assert_eq!(rows(&out.join("skewness.csv")).len(), 101);
}

#[test]
fn recovery_table_layout() {
    let tmp = TempDir::new().unwrap();
    let study = tmp.path().join("study.toml");
    fs::write(
        &study,
        "family = \"csn\"\nbeta = [1.0, 2.0]\ndelta = 0.9\nn = 80\nreplicas = 2\nseed = 3\niterations = 700\nburn_in = 400\nthin = 3\n",
    )
    .unwrap();
    let out = tmp.path().join("rec");
    ok(&["recover", "--study", p(&study), "--out", p(&out)]);
    let table = rows(&out.join("recovery.csv"));
    assert_eq!(table[0], ["Parameter", "Real", "Est", "SD", "Rel Bias", "MSE"]);
    assert_eq!(table.iter().skip(1).map(|r| r[0].as_str()).collect::<Vec<_>>(), ["beta0", "beta1", "delta"]);
    let first = fs::read(out.join("recovery.csv")).unwrap();
    ok(&["recover", "--study", p(&study), "--out", p(&out)]);
    assert_eq!(fs::read(out.join("recovery.csv")).unwrap(), first);
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "y,x\n1,0.5\n0,abc\n1,2\n").unwrap();
    let out = tmp.path().join("o");
    let (code, _, stderr) = smcsn(&["fit", "--data", p(&bad), "--out", p(&out)]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("line 3"), "{stderr}");

    let (code, _, _) = smcsn(&["fit", "--data", p(&tmp.path().join("missing.csv")), "--out", p(&out)]);
    assert_eq!(code, 2);

    let good = simulated(tmp.path(), 60, "1,2", "0.9", "csn", &[]);
    let (code, _, _) = smcsn(&["fit", "--data", p(&good), "--family", "weibull", "--out", p(&out)]);
    assert_eq!(code, 4);
    let (code, _, stderr) = smcsn(&["fit", "--data", p(&good), "--iters", "100", "--burnin", "50", "--out", p(&out)]);
    assert_eq!(code, 4, "{stderr}");
    let (code, _, _) = smcsn(&["simulate", "--n", "10", "--family", "cst", "--shape", "1.5", "--out", p(&out)]);
    assert_eq!(code, 4);
    let (code, stdout, _) = smcsn(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("sign-study"));
}
