use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn plsstop(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plsstop"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PLSSTOP_SEED")
        .output()
        .expect("run plsstop")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Simulates one dataset into `dir/name` and returns the CSV path.
fn simulate(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec!["simulate", "--out-dir", name];
    args.extend_from_slice(extra);
    let o = plsstop(&args, dir);
    assert!(o.status.success(), "{}", stderr(&o));
    dir.join(name).join("dataset_001.csv")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn simulate_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--regime", "n-lt-p", "--n", "20", "--p", "30"];
    let a = simulate(dir.path(), "a", &args);
    let b = simulate(dir.path(), "b", &args);
    let rows = csv_rows(&a);
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r.len() == 31));
    assert_eq!(rows[0].last().unwrap(), "y");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let meta = fs::read_to_string(dir.path().join("a/dataset_001.meta.txt")).unwrap();
    assert!(meta.contains("eta_scale = 1"));
    assert!(dir.path().join("a/dataset_001.latent.csv").exists());
    assert_eq!(
        csv_rows(&dir.path().join("a/dataset_001.test.csv")).len(),
        81
    );
}

#[test]
fn simulate_binomial_response_is_binary() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(
        dir.path(),
        "b",
        &["--family", "binomial", "--n", "50", "--p", "8"],
    );
    let rows = csv_rows(&path);
    assert!(rows[1..]
        .iter()
        .all(|r| matches!(r.last().unwrap().as_str(), "0" | "1")));
}

#[test]
fn select_guards_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(
        dir.path(),
        "s",
        &["--family", "binomial", "--n", "40", "--p", "8"],
    );
    let o = plsstop(
        &[
            "select",
            "--data",
            path.to_str().unwrap(),
            "--family",
            "binomial",
            "--criterion",
            "q2",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("criterion requires gaussian family"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn select_bootyt_rerun_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(
        dir.path(),
        "s",
        &["--n", "60", "--p", "10", "--sigma5", "1"],
    );
    let data = path.to_str().unwrap();
    for out in ["r1", "r2"] {
        let o = plsstop(
            &[
                "select",
                "--data",
                data,
                "--criterion",
                "bootyt",
                "--alpha",
                "0.05",
                "--R",
                "500",
                "--seed",
                "42",
                "--out-dir",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).starts_with("bootyt: K="));
    }
    let a = fs::read(dir.path().join("r1/trace.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("r2/trace.csv")).unwrap());
    let header = String::from_utf8_lossy(&a)
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert!(header.starts_with("k,statistic,decision"));
    let cfg = fs::read_to_string(dir.path().join("r1/run_config.txt")).unwrap();
    assert!(cfg.contains("seed = 42") && cfg.contains("R = 500"));
}

#[test]
fn select_reports_missing_response_and_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "s", &["--n", "30", "--p", "8"]);
    let o = plsstop(
        &[
            "select",
            "--data",
            path.to_str().unwrap(),
            "--criterion",
            "q2",
            "--response",
            "target",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`target`"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "x1,x2,y\n1,2,3\n4,five,6\n").unwrap();
    let o = plsstop(
        &["select", "--data", "bad.csv", "--criterion", "q2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn compare_row_count_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = plsstop(
        &[
            "compare",
            "--n",
            "40",
            "--p",
            "8",
            "--sigma4-count",
            "1",
            "--sigma5-count",
            "2",
            "--datasets",
            "3",
            "--criteria",
            "q2,bicdof",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let grid = csv_rows(&dir.path().join("out/grid.csv"));
    assert_eq!(grid.len(), 1 + 2 * 3 * 2);
    let summary = csv_rows(&dir.path().join("out/summary.csv"));
    let verdict = summary[0].iter().position(|h| h == "verdict").unwrap();
    let allowed = ["A_better", "B_better", "no_difference", "insufficient"];
    let tests: Vec<_> = summary.iter().filter(|r| r[0] == "test").collect();
    assert!(!tests.is_empty());
    assert!(tests.iter().all(|r| allowed.contains(&r[verdict].as_str())));
    let runtime = grid[0].iter().position(|h| h == "runtime_ms").unwrap();
    assert!(grid[1..].iter().all(|r| r[runtime].is_empty()));
}

#[test]
fn compare_paper_scale_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = plsstop(
        &[
            "compare",
            "--paper-scale",
            "--n",
            "30",
            "--p",
            "6",
            "--sigma4-count",
            "1",
            "--sigma5-count",
            "1",
            "--criteria",
            "q2",
            "--test-rows",
            "0",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg = fs::read_to_string(dir.path().join("out/run_config.txt")).unwrap();
    assert!(
        cfg.contains("datasets = 100") && cfg.contains("R = 500"),
        "{cfg}"
    );
    assert_eq!(csv_rows(&dir.path().join("out/grid.csv")).len(), 101);
}

#[test]
fn compare_with_every_row_failing_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = plsstop(
        &[
            "compare",
            "--family",
            "binomial",
            "--n",
            "20",
            "--p",
            "6",
            "--sigma4-count",
            "1",
            "--sigma5-count",
            "1",
            "--datasets",
            "2",
            "--criteria",
            "cvmc",
            "--q",
            "50",
            "--out-dir",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let grid = csv_rows(&dir.path().join("out/grid.csv"));
    assert!(grid[1..].iter().all(|r| !r.last().unwrap().is_empty()));
}

#[test]
fn robustness_jackknife_counts_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "s", &["--n", "30", "--p", "8", "--sigma5", "1"]);
    let data = path.to_str().unwrap();
    let run = |out: &str| {
        let o = plsstop(
            &[
                "robustness",
                "--data",
                data,
                "--criterion",
                "q2",
                "--mode",
                "jackknife",
                "--out-dir",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("modal K="));
        fs::read(dir.path().join(out).join("histogram.csv")).unwrap()
    };
    let a = run("j1");
    let total: usize = csv_rows(&dir.path().join("j1/histogram.csv"))[1..]
        .iter()
        .map(|r| r[1].parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 30);
    assert_eq!(a, run("j2"));
}

#[test]
fn robustness_defaults_to_one_hundred_bootstrap_resamples() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "s", &["--n", "30", "--p", "6"]);
    let o = plsstop(
        &[
            "robustness",
            "--data",
            path.to_str().unwrap(),
            "--criterion",
            "bicdof",
            "--out-dir",
            "b",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg = fs::read_to_string(dir.path().join("b/run_config.txt")).unwrap();
    assert!(cfg.contains("mode = bootstrap") && cfg.contains("B = 100"));
    assert!(stdout(&o).contains("of 100 resamples"));
}

#[test]
fn partition_count_prints_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = plsstop(&["partition-count", "--n", "5", "--q", "2"], dir.path());
    assert_eq!(stdout(&o).trim(), "10");
    let o = plsstop(&["partition-count", "--n", "60", "--q", "3"], dir.path());
    assert_eq!(stdout(&o).trim(), "96305202413079303971977650");
    let o = plsstop(&["partition-count", "--n", "2", "--q", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_and_environment_seed() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# simulate settings\nn = 25\np = 7\nseed = 9\n",
    )
    .unwrap();
    let o = plsstop(
        &[
            "simulate",
            "--config",
            "run.cfg",
            "--p",
            "5",
            "--out-dir",
            "c",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("c/dataset_001.csv"));
    assert_eq!((rows.len(), rows[0].len()), (26, 6));
    let cfg = fs::read_to_string(dir.path().join("c/run_config.txt")).unwrap();
    assert!(cfg.contains("seed = 9"));

    let o = Command::new(env!("CARGO_BIN_EXE_plsstop"))
        .args(["simulate", "--n", "25", "--p", "5", "--out-dir", "e"])
        .current_dir(dir.path())
        .env("PLSSTOP_SEED", "9")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        fs::read(dir.path().join("c/dataset_001.csv")).unwrap(),
        fs::read(dir.path().join("e/dataset_001.csv")).unwrap()
    );
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        plsstop(&["select", "--bogus"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(plsstop(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(plsstop(&["--help"], dir.path()).status.code(), Some(0));
}
