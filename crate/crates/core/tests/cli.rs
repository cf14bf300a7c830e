use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bifprob"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn analyze(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["analyze", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn probability(r: &Value, source: &str) -> Option<f64> {
    r["probabilities"].as_array()?.iter().find(|e| e["source"] == source)?["value"].as_f64()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn example31_is_exactly_one_quarter() {
    let tmp = tempfile::tempdir().unwrap();
    let out = analyze(&config("example31"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(tmp.path());
    assert_eq!(probability(&r, "analytic"), Some(0.25));
    let mc = probability(&r, "monte_carlo").unwrap();
    assert!((0.247..=0.252).contains(&mc), "{mc}");
    let csv = std::fs::read_to_string(tmp.path().join("product_pdf.csv")).unwrap();
    assert!(csv.starts_with("x,density\n"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("analytic       0.250000"), "{stdout}");
}

#[test]
fn ps_d_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = analyze(&config("ps_d"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(tmp.path());
    let gmix = probability(&r, "gmm").unwrap();
    assert!((gmix - 0.9049).abs() <= 0.03, "{gmix}");
    let mc = &r["probabilities"].as_array().unwrap().iter().find(|e| e["source"] == "monte_carlo").unwrap();
    let (p, se) = (mc["value"].as_f64().unwrap(), mc["std_error"].as_f64().unwrap());
    assert!((p - 0.8903).abs() <= 3.0 * se, "{p} ± {se}");
    assert_eq!(r["moment_provenance"], "mellin_pce");
    assert_eq!(r["moments"].as_array().unwrap().len(), 5);
    assert_eq!(r["mixture"]["mixture"]["pi"].as_array().unwrap().len(), 2);
    let ys: Vec<f64> = r["cdf"].as_array().unwrap().iter().map(|c| c["y"].as_f64().unwrap()).collect();
    assert_eq!(ys, vec![-0.15, -0.05, 0.0, 0.05]);
    for f in ["gmm_pdf.csv", "gmm_cdf.csv", "mc_histogram.csv", "mc_ecdf.csv", "moments.json", "mixture.json", "report.txt"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
}

#[test]
fn watt_ut_fractions() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(analyze(&config("watt_ut"), tmp.path(), &[]).status.code(), Some(0));
    assert_eq!(report(tmp.path())["unscented"]["fraction"], "1/5");
    let points = std::fs::read_to_string(tmp.path().join("ut_points.csv")).unwrap();
    assert!(points.starts_with("beta,alpha,value,subcritical\n"));
    assert_eq!(points.lines().count(), 6);
    assert_eq!(analyze(&config("watt_ut5"), tmp.path(), &[]).status.code(), Some(0));
    assert_eq!(report(tmp.path())["unscented"]["fraction"], "2/9");
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert_eq!(analyze(&config("ps_a"), dir.path(), &[]).status.code(), Some(0));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 6);
    for n in names {
        assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let (d1, d2) = (tmp.path().join("s1"), tmp.path().join("s2"));
    let cfg = config("ps_d_mc");
    assert_eq!(analyze(&cfg, &d1, &["--seed", "1", "--eval-cdf", "-0.1,0"]).status.code(), Some(0));
    assert_eq!(analyze(&cfg, &d2, &["--seed", "2"]).status.code(), Some(0));
    let (r1, r2) = (report(&d1), report(&d2));
    assert_eq!(r1["seed"], 1);
    assert_eq!(r1["cdf"].as_array().unwrap().len(), 2);
    assert_eq!(r1["cdf"][0]["y"].as_f64(), Some(-0.1));
    assert_ne!(probability(&r1, "monte_carlo"), probability(&r2, "monte_carlo"));
}

#[test]
fn monte_carlo_never_touches_mellin_or_pce() {
    // N = 40 trips the PCE degree guard and a point germ has no polynomial
    // family, so any Mellin/PCE call would fail.
    let body = |method: &str| {
        format!(
            r#"{{"model": "lorenz",
                "inputs": {{"zeta": {{"kind": "beta", "alpha": 2, "beta": 2}}, "theta": {{"kind": "gamma", "shape": 8, "rate": 1}}}},
                "method": "{method}",
                "params": {{"N": 40, "germ": {{"kind": "point", "value": 0.5}}, "n_moms": 5, "k": 2, "n_samples": 20000, "seed": 3}}}}"#
        )
    };
    let tmp = tempfile::tempdir().unwrap();
    let mc = write_config(tmp.path(), "mc.json", &body("monte_carlo"));
    let out = analyze(&mc, &tmp.path().join("mc"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&tmp.path().join("mc"));
    assert!(r.get("moment_provenance").is_none());
    assert!(r["moments"].as_array().unwrap().iter().all(|m| m.get("mellin").is_none()));

    let gmm = write_config(tmp.path(), "gmm.json", &body("mellin_pce_gmm"));
    assert_ne!(analyze(&gmm, &tmp.path().join("gmm"), &[]).status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let code = |body: &str| {
        let p = write_config(tmp.path(), "c.json", body);
        analyze(&p, &out, &[]).status.code()
    };
    let lorenz = |zeta: &str, rest: &str| {
        format!(
            r#"{{"model": "lorenz", "inputs": {{"zeta": {zeta}, "theta": {{"kind": "gamma", "shape": 8, "rate": 1}}}}, {rest}}}"#
        )
    };
    let u01 = r#"{"kind": "uniform", "a": 0, "b": 1}"#;
    assert_eq!(code("{ not json"), Some(2));
    assert_eq!(code(r#"{"model": "duffing", "inputs": {}, "method": "monte_carlo"}"#), Some(2));
    assert_eq!(code(&lorenz(u01, r#""method": "mellin_pce_gmm", "params": {"N": 2, "n_moms": 5}"#)), Some(2));
    assert_eq!(code(&lorenz(r#"{"kind": "uniform", "a": 2, "b": 1}"#, r#""method": "monte_carlo""#)), Some(2));
    assert_eq!(code(&lorenz(u01, r#""method": "bogus""#)), Some(2));
    assert_eq!(code(&lorenz(u01, r#""method": "monte_carlo", "params": {"n_samples": 10, "colour": 1}"#)), Some(2));
    // zeta = -1 inside the support: a numerical failure, not a config error
    let singular = lorenz(
        r#"{"kind": "uniform", "a": -2, "b": 1}"#,
        r#""method": "mellin_pce_gmm", "params": {"N": 2, "n_moms": 5, "k": 2}"#,
    );
    assert_eq!(code(&singular), Some(3));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--config", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let ps_b = config("ps_b");
    let cases: [(&str, &Path, &str); 7] = [
        ("mellin-product", &config("example31"), "product_pdf.csv"),
        ("pce", &ps_b, "pce.json"),
        ("moments", &ps_b, "moments.json"),
        ("fit-gmm", &ps_b, "mixture.json"),
        ("reconstruct", &config("ps_a_legendre"), "approx_pdf.csv"),
        ("ut", &config("watt_ut"), "ut_points.csv"),
        ("mc", &config("ps_d_mc"), "mc_histogram.csv"),
    ];
    for (cmd, cfg, file) in cases {
        let dir = tmp.path().join(cmd);
        let out = run(&[cmd, "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.join(file).exists(), "{cmd} wrote no {file}");
        assert_eq!(report(&dir)["command"], cmd);
    }
    let pce = report(&tmp.path().join("pce"));
    let powers: Vec<f64> = pce["pce"]["powers"]["coeffs"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (a, b) in powers.iter().zip([0.1163, 0.5210, -0.1739]) {
        assert!((a - b).abs() < 5e-3);
    }
    // a mixture fit needs k
    let out = run(&["fit-gmm", "--config", config("ps_a_legendre").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.k"));
}
