use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tsallis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsallis"))
        .args(args)
        .env_remove("TSALLIS_WORKERS")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sample_file(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let file = dir.join(name);
    let mut args = vec!["sample", "--out", path(&file)];
    args.extend_from_slice(extra);
    let out = tsallis(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--family", "qgauss", "--m", "2", "--q", "1.2", "--n", "1000", "--seed", "7"];
    let a = fs::read(sample_file(dir.path(), "a.csv", &args)).unwrap();
    let b = fs::read(sample_file(dir.path(), "b.csv", &args)).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1001);
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 2));
}

#[test]
fn non_normalizable_q_exits_1_and_names_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.csv");
    let out = tsallis(&[
        "sample", "--family", "qgauss", "--m", "2", "--q", "3", "--n", "10", "--out", path(&file),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["exit_code"], 1);
    assert!(err["message"].as_str().unwrap().contains("q < 1 + 2/m"));
    assert!(!file.exists());
}

#[test]
fn gg_with_s_2_has_normal_moments() {
    let dir = tempfile::tempdir().unwrap();
    let file = sample_file(
        dir.path(),
        "gg.csv",
        &["--family", "gg", "--m", "2", "--s", "2", "--n", "40000", "--seed", "3"],
    );
    let text = fs::read_to_string(file).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let n = rows.len() as f64;
    for j in 0..2 {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let kurt = rows.iter().map(|r| (r[j] - mean).powi(4)).sum::<f64>() / n / (var * var);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
        assert!((kurt - 3.0).abs() < 0.15, "kurtosis {kurt}");
    }
    let cross = rows.iter().map(|r| r[0] * r[1]).sum::<f64>() / n;
    assert!(cross.abs() < 0.02);
}

#[test]
fn entropy_reproduces_the_two_point_example() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("two.csv");
    fs::write(&file, "x\n0\n1\n").unwrap();
    let i_exact = (8.0 / std::f64::consts::PI).sqrt();
    for engine in ["tree", "brute"] {
        let v = stdout_json(&tsallis(&[
            "entropy", "--in", path(&file), "--k", "1", "--q", "0.5", "--engine", engine,
        ]));
        assert!((v["i_hat"].as_f64().unwrap() - i_exact).abs() <= 1e-12);
        assert!((v["h_hat"].as_f64().unwrap() - (1.0 - i_exact) / -0.5).abs() <= 1e-12);
        assert_eq!(v["N"], 2);
        assert_eq!(v["m"], 1);
    }
}

#[test]
fn brute_and_tree_engines_print_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = sample_file(
        dir.path(),
        "x.csv",
        &["--family", "qgauss", "--m", "3", "--q", "0.7", "--n", "800", "--seed", "1"],
    );
    let run = |engine: &str| {
        tsallis(&["entropy", "--in", path(&file), "--k", "2", "--q", "1.3", "--engine", engine]).stdout
    };
    assert_eq!(run("tree"), run("brute"));
}

#[test]
fn duplicate_rows_with_q_above_one_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dup.csv");
    fs::write(&file, "0,0\n1,1\n1,1\n2,0.5\n").unwrap();
    let out = tsallis(&["entropy", "--in", path(&file), "--k", "1", "--q", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["exit_code"], 1);
    let jittered = tsallis(&[
        "entropy", "--in", path(&file), "--k", "1", "--q", "1.5", "--jitter-seed", "9",
    ]);
    assert!(stdout_json(&jittered)["i_hat"].as_f64().unwrap().is_finite());
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "a,b\n1,2\n3,4\n5\n").unwrap();
    let out = tsallis(&["entropy", "--in", path(&ragged), "--k", "1", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("line 4"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3,zz\n").unwrap();
    let out = tsallis(&["entropy", "--in", path(&bad), "--k", "1", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_json(&out)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 2") && msg.contains("zz"), "{msg}");

    let missing = dir.path().join("missing.csv");
    let out = tsallis(&["entropy", "--in", path(&missing), "--k", "1", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gof_table_miss_without_simulate_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let x = sample_file(
        dir.path(),
        "x.csv",
        &["--family", "qgauss", "--m", "2", "--q", "1.2", "--n", "200", "--seed", "2"],
    );
    let table = dir.path().join("table.csv");
    fs::write(&table, "q,m,k,N,alpha,crit,M,seed\n1.2,2,1,100,0.05,0.2,1000,1\n").unwrap();
    let base = ["gof", "--in", path(&x), "--q", "1.2", "--k", "1", "--table", path(&table)];
    let out = tsallis(&base);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["exit_code"], 2);

    let mut fallback = base.to_vec();
    fallback.extend(["--simulate", "50", "--seed", "4"]);
    let v = stdout_json(&tsallis(&fallback));
    assert!(v["critical_value"].as_f64().unwrap().is_finite());
    assert!(v["reject"].is_boolean());

    fs::write(&table, "q,m,k,N,alpha,crit,M,seed\n1.2,2,1,200,0.05,1e9,1000,1\n").unwrap();
    let v = stdout_json(&tsallis(&base));
    assert_eq!(v["critical_value"], 1e9);
    assert_eq!(v["reject"], false);
}

#[test]
fn gof_infeasible_q_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let x = sample_file(
        dir.path(),
        "x.csv",
        &["--family", "qgauss", "--m", "2", "--q", "0.5", "--n", "200", "--seed", "2"],
    );
    let out = tsallis(&[
        "gof", "--in", path(&x), "--family", "t1", "--q", "1.8", "--k", "1", "--simulate", "20",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("1 + 2/(m + 2)"));
}

#[test]
fn gof_simulation_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let x = sample_file(
        dir.path(),
        "x.csv",
        &["--family", "qgauss", "--m", "1", "--q", "0.6", "--n", "300", "--seed", "5"],
    );
    let run = || {
        tsallis(&[
            "gof", "--in", path(&x), "--q", "0.6", "--k", "1", "--simulate", "60", "--seed", "8",
        ])
    };
    let a = run();
    let v = stdout_json(&a);
    assert_eq!(v["family"], "T2");
    assert_eq!(a.stdout, run().stdout);
}

const SMALL_TABLE: &str = r#"
kind = "critical-values"
master_seed = 11
replications = 100
[[grid]]
q = [1.2, 0.5]
m = [1]
k = [1]
N = [50]
"#;

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("table.toml");
    fs::write(&config, SMALL_TABLE).unwrap();
    let run = |out: &Path, workers: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_tsallis"))
            .args(["critical-values", "--config", path(&config), "--out", path(out), "--no-resume"])
            .env("TSALLIS_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out.join("critical_values.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"), "1");
    let b = run(&dir.path().join("b"), "3");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 3);
}

#[test]
fn experiment_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, format!("colour = 2\n{SMALL_TABLE}")).unwrap();
    let out = tsallis(&["critical-values", "--config", path(&config), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("colour"));

    fs::write(&config, SMALL_TABLE).unwrap();
    let out = tsallis(&["convergence", "--config", path(&config), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unmarked_infeasible_experiment_cell_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, SMALL_TABLE.replace("q = [1.2, 0.5]", "q = [1.9]")).unwrap();
    let out = tsallis(&["critical-values", "--config", path(&config), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("critical_values.csv").exists());
}
