//! End-to-end runs of the `echolab` binary on small configurations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use echolab::io::{read_series, read_table};
use echolab::manifest::{Manifest, MANIFEST_FILE};
use echolab::{ExperimentConfig, ExperimentKind};

fn echolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_echolab"))
        .args(args)
        .env_remove("ECHOLAB_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = echolab(args);
    assert!(
        out.status.success(),
        "echolab {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = echolab(args);
    assert!(!out.status.success(), "echolab {args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL_KICKED: &[&str] = &[
    "echo-kicked",
    "--name",
    "small",
    "--seed",
    "5",
    "--n",
    "32,64",
    "--sigma",
    "0.5",
    "--n-states",
    "6",
    "--t-max",
    "12",
];

fn run_small(root: &Path, extra: &[&str]) -> Manifest {
    let mut args = SMALL_KICKED.to_vec();
    args.extend(["--out", s(root)]);
    args.extend(extra);
    ok(&args);
    Manifest::read(&root.join("small").join(MANIFEST_FILE)).unwrap()
}

fn hashes(m: &Manifest) -> BTreeMap<String, String> {
    m.runs.iter().flat_map(|r| r.sha256.clone()).collect()
}

#[test]
fn recipes_are_listed_and_parse() {
    let list = ok(&["recipe", "--list"]);
    let names: Vec<&str> = list.lines().collect();
    assert_eq!(names.len(), 10);
    for name in names {
        let text = ok(&["recipe", name, "--print"]);
        let cfg = ExperimentConfig::from_toml_with(&text, &[]).unwrap();
        assert_eq!(cfg.name, name);
    }
    let fig1 = echolab::recipes::recipe("fig1", &[]).unwrap();
    assert_eq!(fig1.model.k, 2.0);
    assert_eq!(fig1.sweep.sigma, vec![0.5]);
    let fig6 = echolab::recipes::recipe("fig6", &[]).unwrap();
    assert_eq!((fig6.model.name.as_str(), fig6.model.k), ("rotator", 11.0));
    assert_eq!(fig6.sweep.sigma, vec![0.3]);
    assert_eq!(fig6.analysis.r, Some(0.375));
    assert!(fails(&["recipe", "fig99"]).contains("fig99"));
}

#[test]
fn reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_small(&dir.path().join("a"), &[]);
    let b = run_small(&dir.path().join("b"), &[]);
    assert!(!hashes(&a).is_empty());
    assert_eq!(hashes(&a), hashes(&b));
    let ids: Vec<&str> = a.runs.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, ["sawtooth_K2_s0.5_N32", "sawtooth_K2_s0.5_N64"]);
}

#[test]
fn collision_is_refused_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_small(dir.path(), &[]);
    let mut args = SMALL_KICKED.to_vec();
    args.extend(["--out", s(dir.path())]);
    let err = fails(&args);
    assert!(err.contains("--force"), "{err}");
    args.push("--force");
    ok(&args);
    let again = Manifest::read(&dir.path().join("small").join(MANIFEST_FILE)).unwrap();
    assert_eq!(hashes(&first), hashes(&again));
}

#[test]
fn flags_override_the_file_and_land_in_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "name = \"fromfile\"\nkind = \"kicked-echo\"\nseed = 1\n\
         [sweep]\nn = [16]\nsigma = [0.5]\n[ensemble]\nn_states = 3\n[time]\nt_max = 5\n",
    )
    .unwrap();
    ok(&[
        "echo-kicked",
        "--config",
        s(&cfg),
        "--n",
        "32",
        "--set",
        "ensemble.n_states=4",
        "--out",
        s(dir.path()),
    ]);
    let exp = dir.path().join("fromfile");
    let m = Manifest::read(&exp.join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.runs.len(), 1);
    let run = &m.runs[0];
    assert_eq!(run.param_f64("N"), Some(32.0));
    let series = read_series(&exp.join(&run.files["echo"])).unwrap();
    assert_eq!(series.ensemble_size, 4);
    assert_eq!(series.len(), 6);
    let table = read_table(&exp.join(&run.files["echo"])).unwrap();
    assert_eq!(table.meta("config.sweep.n"), Some("[32]"));
    assert_eq!(table.meta("config.ensemble.n_states"), Some("4"));
    assert_eq!(table.meta("config.seed"), Some("1"));
    assert!(table.meta("echolab_version").unwrap().contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn invalid_configs_name_the_field() {
    let err = fails(&["echo-kicked", "--n", "32", "--sigma", "0.5"]);
    assert!(err.contains("seed"), "{err}");
    let err = fails(&["echo-kicked", "--seed", "1", "--sigma", "0.5"]);
    assert!(err.contains("sweep.n"), "{err}");
    let err = fails(&[
        "echo-kicked",
        "--seed",
        "1",
        "--n",
        "32",
        "--sigma",
        "0.5",
        "--set",
        "ensemble.n_states=0",
    ]);
    assert!(err.contains("ensemble.n_states"), "{err}");
    let err = fails(&["echo-kicked", "--seed", "1", "--n", "32", "--sigma", "0.5", "--model", "pendulum"]);
    assert!(err.contains("model.name"), "{err}");
    let err = fails(&["scan", "--seed", "1", "--sigma", "3", "--n", "16,32"]);
    assert!(err.contains("sweep.n"), "{err}");
    let err = fails(&["echo-kicked", "--config", "/nonexistent/c.toml"]);
    assert!(err.contains("missing"), "{err}");
}

#[test]
fn env_var_sets_the_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_KICKED.to_vec();
    args.extend(["--set", "time.t_max=3"]);
    let out = Command::new(env!("CARGO_BIN_EXE_echolab"))
        .args(&args)
        .env("ECHOLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("small").join(MANIFEST_FILE).exists());
}

#[test]
fn report_is_idempotent_and_checks_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_small(dir.path(), &[]);
    let exp = dir.path().join("small");
    let first = ok(&["report", s(&exp)]);
    let txt = fs::read(exp.join("report.txt")).unwrap();
    let json = fs::read(exp.join("report.json")).unwrap();
    let second = ok(&["report", s(&exp.join(MANIFEST_FILE))]);
    assert_eq!(first, second);
    assert_eq!(txt, fs::read(exp.join("report.txt")).unwrap());
    assert_eq!(json, fs::read(exp.join("report.json")).unwrap());
    assert!(first.contains("fit_rate"));
    let plot = exp.join("plot").join(m.runs[0].files["echo"].replace(".csv", ".dat"));
    let dat = fs::read_to_string(plot).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 13);

    fs::remove_file(exp.join(&m.runs[1].files["echo"])).unwrap();
    let err = fails(&["report", s(&exp)]);
    assert!(err.contains("missing"), "{err}");
}

#[test]
fn empty_manifest_reports_no_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml_with(
        "name = \"empty\"\nkind = \"fit\"\nseed = 1\n[inputs]\nseries = [\"x.csv\"]\n",
        &[],
    )
    .unwrap();
    assert_eq!(cfg.kind, ExperimentKind::Fit);
    let path = dir.path().join(MANIFEST_FILE);
    Manifest::new(&cfg).write(&path).unwrap();
    let out = echolab(&["report", s(&path)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("(no runs)"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no runs"));
}

#[test]
fn fit_reads_series_written_by_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_small(dir.path(), &[]);
    let exp = dir.path().join("small");
    let input: PathBuf = exp.join(&m.runs[1].files["echo"]);
    ok(&[
        "fit",
        "--seed",
        "1",
        "--name",
        "refit",
        "--input",
        s(&input),
        "--set",
        "analysis.window=[2.0, 6.0]",
        "--out",
        s(dir.path()),
    ]);
    let fit = Manifest::read(&dir.path().join("refit").join(MANIFEST_FILE)).unwrap();
    let rate = fit.runs[0].result_f64("fit_rate").unwrap();
    let series = read_series(&input).unwrap();
    let direct = echolab_core::analysis::fit_exponential(&series, 2.0, 6.0).unwrap().rate;
    assert_eq!(rate, direct);
}

#[test]
fn ising_scan_and_oracle_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(dir.path());
    ok(&[
        "echo-ising", "--seed", "1", "--n-p", "8,40", "--lambda0", "0.96", "--lambda", "0.99", "--set",
        "time.steps=50", "--set", "ising.ed_check=true", "--out", out,
    ]);
    let m = Manifest::read(&dir.path().join("ising-echo").join(MANIFEST_FILE)).unwrap();
    let ed_err = m
        .runs
        .iter()
        .find_map(|r| r.result_f64("ed_max_abs_dln"))
        .expect("ED comparison recorded for N_p = 8");
    assert!(ed_err < 1e-8);

    ok(&["scan", "--seed", "1", "--delta-lambda", "0.04", "--out", out]);
    let m = Manifest::read(&dir.path().join("scan").join(MANIFEST_FILE)).unwrap();
    assert!(m.runs.iter().any(|r| r.result_f64("detected").is_some()));

    ok(&[
        "oracle-classical", "--seed", "1", "--k", "2", "--set", "classical.n_traj=4", "--set",
        "classical.length=5000", "--set", "classical.lyapunov_traj=4", "--set", "classical.lyapunov_steps=1000",
        "--set", "classical.lambda1_traj=200", "--set", "classical.lambda1_steps=5", "--out", out,
    ]);
    let m = Manifest::read(&dir.path().join("classical-oracle").join(MANIFEST_FILE)).unwrap();
    let run = &m.runs[0];
    let lyap = run.result_f64("lambda_L").unwrap();
    assert!((lyap - (2.0 + 3f64.sqrt()).ln()).abs() < 0.05, "{lyap}");
}
