//! Grid execution.
//!
//! Runs are independent jobs pulled from a shared counter by `parallelism`
//! worker threads. Finished records go through a channel to the caller's
//! thread, which buffers out-of-order arrivals and emits records in grid order,
//! so the output does not depend on scheduling.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use super::config::{ExperimentConfig, MethodChoice};
use super::record::{RunRecord, RunWriter};
use crate::baselines::{solve_baseline, BaselineSpec, Method};
use crate::error::Result;
use crate::event_driven::{solve_observed, SolverParams, StepBoundsMonitor};
use crate::problem::{Counted, DifferentiableProblem, SolveReport};
use crate::quasi_likelihood::{generate_dataset, DatasetSpec, QLProblem, Variance};

/// One (variance, m, n) block with its dataset.
#[derive(Debug, Clone)]
pub struct Cell {
    pub variance: Variance,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub problem: QLProblem,
    pub starts: Vec<Vec<f64>>,
}

/// One run in the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub cell: usize,
    pub method: MethodChoice,
    /// Step parameter for baselines; `None` for the event-driven method.
    pub step: Option<f64>,
    /// 0-based start index.
    pub start: usize,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dataset seed for a cell; depends only on the master seed and the cell.
pub fn cell_seed(master: u64, variance: Variance, m: usize, n: usize) -> u64 {
    let v = variance as u64;
    [v, m as u64, n as u64]
        .into_iter()
        .fold(splitmix64(master), |acc, x| splitmix64(acc ^ x))
}

pub fn build_cells(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for &variance in &cfg.variance_set {
        for &m in &cfg.m_set {
            for &n in &cfg.n_set {
                let seed = cell_seed(cfg.master_seed, variance, m, n);
                let data = generate_dataset(&DatasetSpec {
                    n,
                    m,
                    variance,
                    seed,
                    num_starts: cfg.num_starts,
                })?;
                cells.push(Cell {
                    variance,
                    m,
                    n,
                    seed,
                    problem: data.problem(variance, cfg.quadrature)?,
                    starts: data.starts,
                });
            }
        }
    }
    Ok(cells)
}

/// Jobs in grid order: cell, then method, then step, then start.
pub fn build_jobs(cfg: &ExperimentConfig, cells: usize) -> Vec<Job> {
    let mut jobs = Vec::with_capacity(cfg.grid_size());
    for cell in 0..cells {
        for &method in &cfg.methods {
            let steps: Vec<Option<f64>> = match method {
                MethodChoice::Baseline(_) => cfg.step_grid.iter().map(|&s| Some(s)).collect(),
                MethodChoice::EventDriven => vec![None],
            };
            for step in steps {
                for start in 0..cfg.num_starts {
                    jobs.push(Job {
                        cell,
                        method,
                        step,
                        start,
                    });
                }
            }
        }
    }
    jobs
}

pub fn hyperparam_label(cfg: &ExperimentConfig, job: &Job) -> String {
    match job.step {
        Some(s) => s.to_string(),
        None => format!(
            "rho={};delta0={};delta_bar={}",
            cfg.rho, cfg.delta0, cfg.delta_bar
        ),
    }
}

fn nan_if_none(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Executes one run. Failures become NaN fields, never errors.
pub fn run_job(cfg: &ExperimentConfig, cell: &Cell, job: &Job) -> RunRecord {
    let timer = Instant::now();
    let problem = Counted::new(cell.problem.clone());
    let theta0 = &cell.starts[job.start];
    let mut monitor = StepBoundsMonitor::default();

    let (start_objective, end_objective, report) = match job.method {
        MethodChoice::Baseline(method) => run_baseline(cfg, &problem, theta0, method, job.step),
        MethodChoice::EventDriven => {
            let report = SolverParams::new(cfg.grad_tol, cfg.rho, cfg.delta_bar, cfg.delta0)
                .and_then(|p| {
                    let params = SolverParams {
                        step_budget: Some(cfg.iteration_cap),
                        ..p
                    };
                    solve_observed(&problem, theta0, &params, &mut monitor)
                })
                .ok();
            let start = report.as_ref().and_then(|r| r.initial_objective());
            let end = report.as_ref().and_then(|r| r.final_objective);
            (nan_if_none(start), nan_if_none(end), report)
        }
    };

    let steps_seen = monitor.count > 0;
    RunRecord {
        problem_name: cell.variance.name().to_string(),
        n: cell.n,
        m: cell.m,
        algorithm: job.method.name().to_string(),
        hyperparams: hyperparam_label(cfg, job),
        start_idx: job.start + 1,
        start_objective,
        end_objective,
        start_grad_norm: report.as_ref().map_or(f64::NAN, |r| r.initial_grad_norm()),
        end_grad_norm: report.as_ref().map_or(f64::NAN, |r| {
            if r.final_grad_norm.is_finite() {
                r.final_grad_norm
            } else {
                f64::NAN
            }
        }),
        iterations: report.as_ref().map_or(0, |r| r.gradient_steps),
        outer_iterations: report.as_ref().map_or(0, |r| r.iterations),
        objective_evals: problem.objective_eval_count(),
        gradient_evals: problem.gradient_eval_count(),
        termination: report
            .as_ref()
            .map_or("error", |r| r.termination.as_str())
            .to_string(),
        step_bound_violations: monitor.violations,
        min_step_size: if steps_seen { monitor.min } else { f64::NAN },
        max_step_size: if steps_seen { monitor.max } else { f64::NAN },
        wall_time_s: timer.elapsed().as_secs_f64(),
    }
}

fn run_baseline<P: DifferentiableProblem>(
    cfg: &ExperimentConfig,
    problem: &P,
    theta0: &[f64],
    method: Method,
    step: Option<f64>,
) -> (f64, f64, Option<SolveReport>) {
    let start = problem.objective(theta0);
    let report = step
        .ok_or(crate::Error::InvalidParameter {
            name: "step",
            reason: "baseline without a step parameter".into(),
        })
        .and_then(|s| BaselineSpec::new(method, s, cfg.iteration_cap, cfg.grad_tol))
        .and_then(|spec| solve_baseline(problem, theta0, &spec))
        .ok();
    let end = report
        .as_ref()
        .map_or(f64::NAN, |r| problem.objective(&r.final_iterate));
    (start, end, report)
}

/// Runs the whole grid, handing records to `sink` in grid order. Returns the
/// number of records emitted.
pub fn run_experiment<F>(cfg: &ExperimentConfig, mut sink: F) -> Result<usize>
where
    F: FnMut(RunRecord) -> Result<()>,
{
    cfg.validate()?;
    let cells = build_cells(cfg)?;
    let jobs = build_jobs(cfg, cells.len());
    let next = AtomicUsize::new(0);
    let workers = cfg.parallelism.min(jobs.len()).max(1);
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (jobs, cells, next) = (&jobs, &cells, &next);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let rec = run_job(cfg, &cells[job.cell], job);
                if tx.send((i, rec)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut emitted = 0usize;
        for (i, rec) in rx {
            pending.insert(i, rec);
            while let Some(rec) = pending.remove(&emitted) {
                if let Err(e) = sink(rec) {
                    // Stop handing out work; workers drain and exit.
                    next.store(jobs.len(), Ordering::Relaxed);
                    return Err(e);
                }
                emitted += 1;
            }
        }
        Ok(emitted)
    })
}

/// [`run_experiment`] streamed to a CSV writer.
pub fn run_experiment_csv<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<usize> {
    let mut w = RunWriter::new(out)?;
    let count = run_experiment(cfg, |r| w.write(&r))?;
    w.finish()?;
    Ok(count)
}
