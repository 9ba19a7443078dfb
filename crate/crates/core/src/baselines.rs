//! Objective-function-free (OFFO) baselines.
//!
//! Every method is written as a state machine: [`Baseline::query_point`] is where
//! the next gradient must be evaluated and [`Baseline::advance`] consumes that
//! gradient and moves to the next iterate. None of them ever looks at the
//! objective. [`solve_baseline`] drives the machine against a problem; the
//! anti-convergence constructions drive the very same machine with engineered
//! gradient values.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{Counted, DifferentiableProblem, SolveReport, Termination, TraceEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    FixedStep,
    DiminishingStep,
    BarzilaiBorweinLong,
    BarzilaiBorweinShort,
    LipschitzApprox,
    NesterovAccelerated,
    WNGrad,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::FixedStep,
        Method::DiminishingStep,
        Method::BarzilaiBorweinLong,
        Method::BarzilaiBorweinShort,
        Method::LipschitzApprox,
        Method::NesterovAccelerated,
        Method::WNGrad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FixedStep => "fixed",
            Method::DiminishingStep => "diminishing",
            Method::BarzilaiBorweinLong => "bb-long",
            Method::BarzilaiBorweinShort => "bb-short",
            Method::LipschitzApprox => "lipschitz-approx",
            Method::NesterovAccelerated => "nesterov",
            Method::WNGrad => "wngrad",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "method",
                reason: format!("unknown baseline `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineSpec {
    pub method: Method,
    /// Step size, or initial step size for the adaptive methods.
    pub step_param: f64,
    /// Maximum number of updates.
    pub budget: usize,
    pub grad_tol: f64,
}

impl BaselineSpec {
    pub fn new(method: Method, step_param: f64, budget: usize, grad_tol: f64) -> Result<Self> {
        if !(step_param > 0.0 && step_param.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step_param",
                reason: format!("must be positive and finite, got {step_param}"),
            });
        }
        if !(grad_tol >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "grad_tol",
                reason: "must be non-negative".into(),
            });
        }
        Ok(Self {
            method,
            step_param,
            budget,
            grad_tol,
        })
    }
}

/// `1 / 2^max(0, floor(log2(k / 100)) + 1)` for `k >= 100`, and 1 before.
pub fn diminishing_factor(k: usize) -> f64 {
    if k < 100 {
        return 1.0;
    }
    // floor(log2(k / 100)) is the largest e with 100 * 2^e <= k.
    let mut e = 0i32;
    while (100usize << (e + 1)) <= k {
        e += 1;
    }
    0.5f64.powi(e + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    pub theta: Vec<f64>,
    pub theta_prev: Option<Vec<f64>>,
    pub grad_prev: Option<Vec<f64>>,
    /// Step size (BB, AdGD) or accumulated weight (WNGrad).
    pub mu: f64,
    /// Previous step-size ratio `lambda_k / lambda_{k-1}` (AdGD).
    pub omega: f64,
    /// Nesterov's ancillary iterate.
    pub momentum: Option<Vec<f64>>,
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct Baseline {
    spec: BaselineSpec,
    state: BaselineState,
}

impl Baseline {
    pub fn new(spec: BaselineSpec, theta0: &[f64]) -> Self {
        let mu = match spec.method {
            Method::WNGrad => 1.0 / spec.step_param,
            _ => spec.step_param,
        };
        let momentum = match spec.method {
            Method::NesterovAccelerated => Some(theta0.to_vec()),
            _ => None,
        };
        Self {
            spec,
            state: BaselineState {
                theta: theta0.to_vec(),
                theta_prev: None,
                grad_prev: None,
                mu,
                omega: f64::INFINITY,
                momentum,
                k: 0,
            },
        }
    }

    pub fn spec(&self) -> &BaselineSpec {
        &self.spec
    }

    pub fn state(&self) -> &BaselineState {
        &self.state
    }

    /// Current iterate `theta_k`.
    pub fn iterate(&self) -> &[f64] {
        &self.state.theta
    }

    /// Point at which the next gradient is required.
    pub fn query_point(&self) -> &[f64] {
        self.state.momentum.as_deref().unwrap_or(&self.state.theta)
    }

    /// Consumes the gradient at [`Self::query_point`] and performs one update.
    pub fn advance(&mut self, grad: &[f64]) {
        let s = &mut self.state;
        let k = s.k;
        let mut next = s.theta.clone();
        match self.spec.method {
            Method::FixedStep => linalg::axpy(-self.spec.step_param, grad, &mut next),
            Method::DiminishingStep => linalg::axpy(
                -self.spec.step_param * diminishing_factor(k),
                grad,
                &mut next,
            ),
            Method::BarzilaiBorweinLong | Method::BarzilaiBorweinShort => {
                if let (Some(tp), Some(gp)) = (&s.theta_prev, &s.grad_prev) {
                    let dtheta = linalg::sub(&s.theta, tp);
                    let dgrad = linalg::sub(grad, gp);
                    let curvature = linalg::dot(&dtheta, &dgrad);
                    let candidate = if self.spec.method == Method::BarzilaiBorweinLong {
                        linalg::dot(&dtheta, &dtheta) / curvature
                    } else {
                        curvature / linalg::dot(&dgrad, &dgrad)
                    };
                    // Degenerate curvature: keep the previous step.
                    if curvature > 0.0 && candidate.is_finite() && candidate > 0.0 {
                        s.mu = candidate;
                    }
                }
                linalg::axpy(-s.mu, grad, &mut next);
            }
            Method::LipschitzApprox => {
                if let (Some(tp), Some(gp)) = (&s.theta_prev, &s.grad_prev) {
                    let dtheta = linalg::distance(&s.theta, tp);
                    let dgrad = linalg::distance(grad, gp);
                    let local = if dgrad > 0.0 {
                        dtheta / (2.0 * dgrad)
                    } else {
                        f64::INFINITY
                    };
                    let growth = (1.0 + s.omega).sqrt() * s.mu;
                    let lambda = local.min(growth);
                    let lambda = if lambda.is_finite() { lambda } else { s.mu };
                    s.omega = lambda / s.mu;
                    s.mu = lambda;
                }
                linalg::axpy(-s.mu, grad, &mut next);
            }
            Method::NesterovAccelerated => {
                let psi = s
                    .momentum
                    .as_ref()
                    .expect("nesterov keeps an ancillary iterate");
                next.copy_from_slice(psi);
                linalg::axpy(-self.spec.step_param, grad, &mut next);
                // psi_{k+1} = theta_{k+1} + (k / (k + 3)) (theta_{k+1} - theta_k)
                let beta = k as f64 / (k as f64 + 3.0);
                let new_psi: Vec<f64> = next
                    .iter()
                    .zip(&s.theta)
                    .map(|(tn, t)| tn + beta * (tn - t))
                    .collect();
                s.momentum = Some(new_psi);
            }
            Method::WNGrad => {
                let gn2 = linalg::dot(grad, grad);
                linalg::axpy(-1.0 / s.mu, grad, &mut next);
                s.mu += gn2 / s.mu;
            }
        }
        s.theta_prev = Some(std::mem::replace(&mut s.theta, next));
        s.grad_prev = Some(grad.to_vec());
        s.k += 1;
    }
}

/// Runs a baseline until the gradient at the query point is within tolerance,
/// a non-finite gradient appears, or `spec.budget` updates have been made.
///
/// The final iterate is the last query point, i.e. the point whose gradient is
/// reported. No objective evaluations are made.
pub fn solve_baseline<P>(problem: &P, theta0: &[f64], spec: &BaselineSpec) -> Result<SolveReport>
where
    P: DifferentiableProblem + ?Sized,
{
    let n = problem.dimension();
    if theta0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: theta0.len(),
        });
    }
    let counted = Counted::new(problem);
    let mut method = Baseline::new(*spec, theta0);
    let mut grad = vec![0.0; n];
    let mut trace = Vec::new();
    let termination = loop {
        counted.gradient_into(method.query_point(), &mut grad);
        let gn = linalg::norm(&grad);
        trace.push(TraceEntry {
            index: method.state.k,
            objective: None,
            grad_norm: gn,
        });
        if !gn.is_finite() || !linalg::all_finite(method.query_point()) {
            break Termination::NonFiniteValue;
        }
        if gn <= spec.grad_tol {
            break Termination::GradientTolerance;
        }
        if method.state.k >= spec.budget {
            break Termination::IterationBudget;
        }
        method.advance(&grad);
    };
    Ok(SolveReport {
        final_iterate: method.query_point().to_vec(),
        final_objective: None,
        final_grad_norm: trace.last().map_or(f64::NAN, |t| t.grad_norm),
        iterations: method.state.k,
        gradient_steps: method.state.k,
        objective_evals: counted.objective_eval_count(),
        gradient_evals: counted.gradient_eval_count(),
        trace,
        termination,
    })
}

pub fn fixed_step<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    spec: &BaselineSpec,
) -> Result<SolveReport> {
    expect_method(spec, &[Method::FixedStep])?;
    solve_baseline(problem, theta0, spec)
}

pub fn diminishing_step<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    spec: &BaselineSpec,
) -> Result<SolveReport> {
    expect_method(spec, &[Method::DiminishingStep])?;
    solve_baseline(problem, theta0, spec)
}

pub fn barzilai_borwein<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    spec: &BaselineSpec,
) -> Result<SolveReport> {
    expect_method(
        spec,
        &[Method::BarzilaiBorweinLong, Method::BarzilaiBorweinShort],
    )?;
    solve_baseline(problem, theta0, spec)
}

pub fn adgd_lipschitz_approx<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    spec: &BaselineSpec,
) -> Result<SolveReport> {
    expect_method(spec, &[Method::LipschitzApprox])?;
    solve_baseline(problem, theta0, spec)
}

pub fn nesterov_accelerated<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    spec: &BaselineSpec,
) -> Result<SolveReport> {
    expect_method(spec, &[Method::NesterovAccelerated])?;
    solve_baseline(problem, theta0, spec)
}

pub fn wngrad<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    spec: &BaselineSpec,
) -> Result<SolveReport> {
    expect_method(spec, &[Method::WNGrad])?;
    solve_baseline(problem, theta0, spec)
}

fn expect_method(spec: &BaselineSpec, allowed: &[Method]) -> Result<()> {
    if allowed.contains(&spec.method) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "method",
            reason: format!("{} is not handled here", spec.method),
        })
    }
}
