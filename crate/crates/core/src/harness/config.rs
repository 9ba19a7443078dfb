//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! variances      = V1, V2, V3, V4
//! m              = 100, 1000
//! n              = 10, 50, 100
//! methods        = fixed, diminishing, bb-long, bb-short, lipschitz-approx, nesterov, wngrad, event-driven
//! step_grid      = 1e-4, 1, 2, 4, 6, 8, 10
//! iteration_cap  = 5000
//! grad_tol       = 1e-3
//! num_starts     = 10
//! rho            = 1e-4
//! delta0         = 1
//! delta_bar      = 1
//! quad_abs_tol   = 1e-10
//! quad_max_depth = 50
//! seed           = 0
//! parallelism    = 1
//! ```
//!
//! Every key is optional; omitted keys take the defaults above, which describe
//! the full benchmark protocol. When `seed` is absent the `EVENTGD_SEED`
//! environment variable, if set, supplies it.

use std::fmt;
use std::str::FromStr;

use crate::baselines::Method;
use crate::error::{Error, Result};
use crate::quasi_likelihood::{QuadratureConfig, Variance};

pub const SEED_ENV: &str = "EVENTGD_SEED";

/// Name used for the event-driven method in configs and records.
pub const EVENT_DRIVEN: &str = "event-driven";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodChoice {
    Baseline(Method),
    EventDriven,
}

impl MethodChoice {
    pub fn all() -> Vec<MethodChoice> {
        Method::ALL
            .iter()
            .map(|&m| MethodChoice::Baseline(m))
            .chain([MethodChoice::EventDriven])
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::Baseline(m) => m.name(),
            MethodChoice::EventDriven => EVENT_DRIVEN,
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == EVENT_DRIVEN {
            Ok(MethodChoice::EventDriven)
        } else {
            s.parse().map(MethodChoice::Baseline)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub variance_set: Vec<Variance>,
    pub m_set: Vec<usize>,
    pub n_set: Vec<usize>,
    pub methods: Vec<MethodChoice>,
    pub step_grid: Vec<f64>,
    pub iteration_cap: usize,
    pub grad_tol: f64,
    pub num_starts: usize,
    pub rho: f64,
    pub delta0: f64,
    pub delta_bar: f64,
    pub quadrature: QuadratureConfig,
    pub master_seed: u64,
    pub parallelism: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            variance_set: Variance::ALL.to_vec(),
            m_set: vec![100, 1000],
            n_set: vec![10, 50, 100],
            methods: MethodChoice::all(),
            step_grid: vec![1e-4, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0],
            iteration_cap: 5000,
            grad_tol: 1e-3,
            num_starts: 10,
            rho: 1e-4,
            delta0: 1.0,
            delta_bar: 1.0,
            quadrature: QuadratureConfig::default(),
            master_seed: 0,
            parallelism: 1,
        }
    }
}

impl ExperimentConfig {
    /// Defaults with the seed taken from `EVENTGD_SEED` when it is set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(s) = std::env::var(SEED_ENV) {
            cfg.master_seed = s.trim().parse().map_err(|_| Error::Config {
                line: 0,
                reason: format!("{SEED_ENV}={s:?} is not an unsigned 64-bit integer"),
            })?;
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seed_given = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                reason: format!("expected `key = value`, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let err = |reason: String| Error::Config { line, reason };
            match key {
                "variances" => cfg.variance_set = list(value).map_err(err)?,
                "m" => cfg.m_set = list(value).map_err(err)?,
                "n" => cfg.n_set = list(value).map_err(err)?,
                "methods" => cfg.methods = list(value).map_err(err)?,
                "step_grid" => cfg.step_grid = list(value).map_err(err)?,
                "iteration_cap" => cfg.iteration_cap = scalar(value).map_err(err)?,
                "grad_tol" => cfg.grad_tol = scalar(value).map_err(err)?,
                "num_starts" => cfg.num_starts = scalar(value).map_err(err)?,
                "rho" => cfg.rho = scalar(value).map_err(err)?,
                "delta0" => cfg.delta0 = scalar(value).map_err(err)?,
                "delta_bar" => cfg.delta_bar = scalar(value).map_err(err)?,
                "quad_abs_tol" => cfg.quadrature.abs_tol = scalar(value).map_err(err)?,
                "quad_max_depth" => cfg.quadrature.max_depth = scalar(value).map_err(err)?,
                "seed" => {
                    cfg.master_seed = scalar(value).map_err(err)?;
                    seed_given = true;
                }
                "parallelism" => cfg.parallelism = scalar(value).map_err(err)?,
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        if !seed_given {
            cfg.master_seed = Self::from_env()?.master_seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::Config {
                line: 0,
                reason: reason.to_string(),
            })
        };
        if self.variance_set.is_empty() || self.m_set.is_empty() || self.n_set.is_empty() {
            return bad("variances, m and n must be non-empty");
        }
        if self.methods.is_empty() {
            return bad("methods must be non-empty");
        }
        if self.n_set.iter().any(|&n| n < 2) || self.m_set.contains(&0) {
            return bad("n must be at least 2 and m at least 1");
        }
        let has_baseline = self
            .methods
            .iter()
            .any(|m| matches!(m, MethodChoice::Baseline(_)));
        if has_baseline && self.step_grid.is_empty() {
            return bad("step_grid must be non-empty when baselines are selected");
        }
        if self.step_grid.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return bad("step sizes must be positive and finite");
        }
        if self.iteration_cap == 0 || self.num_starts == 0 || self.parallelism == 0 {
            return bad("iteration_cap, num_starts and parallelism must be positive");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        self.quadrature.validate()?;
        crate::event_driven::SolverParams::new(
            self.grad_tol,
            self.rho,
            self.delta_bar,
            self.delta0,
        )?;
        Ok(())
    }

    /// Number of runs per (variance, m, n) cell.
    pub fn runs_per_cell(&self) -> usize {
        let per_start: usize = self
            .methods
            .iter()
            .map(|m| match m {
                MethodChoice::Baseline(_) => self.step_grid.len(),
                MethodChoice::EventDriven => 1,
            })
            .sum();
        per_start * self.num_starts
    }

    /// Exact number of records a run of this config emits.
    pub fn grid_size(&self) -> usize {
        self.variance_set.len() * self.m_set.len() * self.n_set.len() * self.runs_per_cell()
    }
}

fn scalar<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse {s:?}"))
}

fn list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|p| scalar(p.trim())).collect()
}
