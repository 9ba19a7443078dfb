//! Run and summary CSV schemas.
//!
//! Both files are UTF-8 with a header row, `.` as decimal separator and `NaN`
//! for missing reals. Reals use shortest round-trip formatting.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const RUN_COLUMNS: [&str; 19] = [
    "problem_name",
    "n",
    "m",
    "algorithm",
    "hyperparams",
    "start_idx",
    "start_objective",
    "end_objective",
    "start_grad_norm",
    "end_grad_norm",
    "iterations",
    "outer_iterations",
    "objective_evals",
    "gradient_evals",
    "termination",
    "step_bound_violations",
    "min_step_size",
    "max_step_size",
    "wall_time_s",
];

pub const SUMMARY_COLUMNS: [&str; 7] = [
    "algorithm",
    "hyperparam",
    "problem_name",
    "pct_approx_stationary",
    "pct_achieved_descent",
    "n_records",
    "n_nan_filtered",
];

/// Threshold on the terminal gradient norm for approximate stationarity.
pub const STATIONARITY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem_name: String,
    pub n: usize,
    pub m: usize,
    pub algorithm: String,
    pub hyperparams: String,
    /// 1-based.
    pub start_idx: usize,
    pub start_objective: f64,
    pub end_objective: f64,
    pub start_grad_norm: f64,
    pub end_grad_norm: f64,
    /// Gradient steps taken (inner steps for the event-driven method).
    pub iterations: usize,
    /// Outer iterations for the event-driven method; equals `iterations` for baselines.
    pub outer_iterations: usize,
    pub objective_evals: u64,
    pub gradient_evals: u64,
    pub termination: String,
    /// Step sizes outside `[1e-16, 1e-16 + 1e16]`; event-driven runs only.
    pub step_bound_violations: u64,
    pub min_step_size: f64,
    pub max_step_size: f64,
    pub wall_time_s: f64,
}

impl RunRecord {
    fn fields(&self) -> [String; 19] {
        [
            self.problem_name.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.algorithm.clone(),
            self.hyperparams.clone(),
            self.start_idx.to_string(),
            self.start_objective.to_string(),
            self.end_objective.to_string(),
            self.start_grad_norm.to_string(),
            self.end_grad_norm.to_string(),
            self.iterations.to_string(),
            self.outer_iterations.to_string(),
            self.objective_evals.to_string(),
            self.gradient_evals.to_string(),
            self.termination.clone(),
            self.step_bound_violations.to_string(),
            self.min_step_size.to_string(),
            self.max_step_size.to_string(),
            self.wall_time_s.to_string(),
        ]
    }

    fn from_fields(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != RUN_COLUMNS.len() {
            return Err(Error::SchemaMismatch(format!(
                "expected {} fields, got {} in {rec:?}",
                RUN_COLUMNS.len(),
                rec.len()
            )));
        }
        fn p<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
            rec[i].parse().map_err(|_| {
                Error::SchemaMismatch(format!(
                    "column {} has bad value {:?}",
                    RUN_COLUMNS[i], &rec[i]
                ))
            })
        }
        Ok(Self {
            problem_name: rec[0].to_string(),
            n: p(rec, 1)?,
            m: p(rec, 2)?,
            algorithm: rec[3].to_string(),
            hyperparams: rec[4].to_string(),
            start_idx: p(rec, 5)?,
            start_objective: p(rec, 6)?,
            end_objective: p(rec, 7)?,
            start_grad_norm: p(rec, 8)?,
            end_grad_norm: p(rec, 9)?,
            iterations: p(rec, 10)?,
            outer_iterations: p(rec, 11)?,
            objective_evals: p(rec, 12)?,
            gradient_evals: p(rec, 13)?,
            termination: rec[14].to_string(),
            step_bound_violations: p(rec, 15)?,
            min_step_size: p(rec, 16)?,
            max_step_size: p(rec, 17)?,
            wall_time_s: p(rec, 18)?,
        })
    }

    pub fn achieved_descent(&self) -> Option<bool> {
        (!self.start_objective.is_nan() && !self.end_objective.is_nan())
            .then_some(self.end_objective < self.start_objective)
    }

    pub fn approx_stationary(&self) -> bool {
        !self.end_grad_norm.is_nan() && self.end_grad_norm <= STATIONARITY_TOL
    }
}

/// Streams run records to CSV, writing the header on construction.
pub struct RunWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RunWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(RUN_COLUMNS)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, rec: &RunRecord) -> Result<()> {
        self.inner.write_record(rec.fields())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(e.error().to_string()))
    }
}

pub fn read_runs<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(RUN_COLUMNS) {
        return Err(Error::SchemaMismatch(format!(
            "unexpected run header {header:?}"
        )));
    }
    rd.records()
        .map(|r| {
            r.map_err(Error::from)
                .and_then(|r| RunRecord::from_fields(&r))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub hyperparam: String,
    pub problem_name: String,
    pub pct_approx_stationary: f64,
    /// NaN when every record of the group was filtered.
    pub pct_achieved_descent: f64,
    pub n_records: usize,
    pub n_nan_filtered: usize,
}

/// Groups by (algorithm, hyperparams, problem_name) in order of first appearance.
///
/// Stationarity counts records whose terminal gradient norm is a number at most
/// `1e-3`, over all records of the group. Descent is computed only over records
/// whose start and end objectives are both numbers.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String, String)> = Vec::new();
    let mut groups: HashMap<(String, String, String), Vec<&RunRecord>> = HashMap::new();
    for r in records {
        let key = (
            r.algorithm.clone(),
            r.hyperparams.clone(),
            r.problem_name.clone(),
        );
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let stationary = rs.iter().filter(|r| r.approx_stationary()).count();
            let kept: Vec<bool> = rs.iter().filter_map(|r| r.achieved_descent()).collect();
            let descent = kept.iter().filter(|&&d| d).count();
            SummaryRow {
                algorithm: key.0,
                hyperparam: key.1,
                problem_name: key.2,
                pct_approx_stationary: stationary as f64 / rs.len() as f64,
                pct_achieved_descent: if kept.is_empty() {
                    f64::NAN
                } else {
                    descent as f64 / kept.len() as f64
                },
                n_records: rs.len(),
                n_nan_filtered: rs.len() - kept.len(),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            r.hyperparam.clone(),
            r.problem_name.clone(),
            r.pct_approx_stationary.to_string(),
            r.pct_achieved_descent.to_string(),
            r.n_records.to_string(),
            r.n_nan_filtered.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
