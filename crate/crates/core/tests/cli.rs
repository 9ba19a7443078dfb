use std::process::{Command, Output};

use eventgd::harness::read_runs;

fn eventgd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eventgd"))
        .args(args)
        .env_remove("EVENTGD_SEED")
        .output()
        .expect("binary runs")
}

const SMALL: &str = "\
variances = V2
m = 30
n = 3
methods = fixed, wngrad, event-driven
step_grid = 1, 10
iteration_cap = 200
num_starts = 3
seed = 11
parallelism = 2
";

#[test]
fn run_then_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, SMALL).unwrap();
    let runs = dir.path().join("runs.csv");
    let out = eventgd(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        runs.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let records = read_runs(std::fs::File::open(&runs).unwrap()).unwrap();
    assert_eq!(records.len(), (2 * 2 + 1) * 3);

    let summary = dir.path().join("summary.csv");
    let out = eventgd(&[
        "summarize",
        "--in",
        runs.to_str().unwrap(),
        "--out",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(summary).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algorithm,hyperparam,problem_name,pct_approx_stationary,pct_achieved_descent,n_records,n_nan_filtered"
    );
    assert_eq!(lines.count(), 5);
    assert!(text.contains("event-driven,"));
}

#[test]
fn rerun_with_other_parallelism_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, SMALL).unwrap();
    let mut csvs = Vec::new();
    for p in ["1", "4"] {
        let path = dir.path().join(format!("runs{p}.csv"));
        let out = eventgd(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--parallel",
            p,
        ]);
        assert!(out.status.success());
        let mut recs = read_runs(std::fs::File::open(&path).unwrap()).unwrap();
        recs.iter_mut().for_each(|r| r.wall_time_s = 0.0);
        csvs.push(format!("{recs:?}"));
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn anticonv_fixed_step_grows() {
    let out = eventgd(&[
        "anticonv",
        "--method",
        "fixed",
        "--step",
        "1",
        "--horizon",
        "50",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let fields: Vec<f64> = last.split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 50.0);
    assert!(fields[2] >= 25.0, "{last}");
    assert_eq!(fields[3], 1.0);
}

#[test]
fn gradcheck_exit_codes() {
    let ok = eventgd(&["gradcheck", "--problem", "ql-v1", "--points", "20"]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let ok = eventgd(&["gradcheck", "--problem", "frankenstein", "--points", "50"]);
    assert!(ok.status.success());
    let bad = eventgd(&["gradcheck", "--problem", "rosenbrock"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bad_arguments_fail() {
    assert!(
        !eventgd(&["anticonv", "--method", "nesterov", "--step", "1"])
            .status
            .success()
    );
    assert!(!eventgd(&["anticonv", "--method", "fixed", "--step", "-1"])
        .status
        .success());
    assert!(!eventgd(&["run", "--out"]).status.success());
    assert!(!eventgd(&["frobnicate"]).status.success());
}

#[test]
fn dataset_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let out = eventgd(&[
        "dataset",
        "--variance",
        "v4",
        "--n",
        "4",
        "--m",
        "12",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let data =
        eventgd::quasi_likelihood::read_dataset_csv(std::fs::File::open(path).unwrap()).unwrap();
    assert_eq!((data.n, data.m, data.starts.len()), (4, 12, 10));
}
