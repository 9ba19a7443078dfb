//! Smooth objectives on which objective-function-free methods diverge.
//!
//! For a method whose iterates can be driven to march right by a chosen
//! sequence of gradient values, we concatenate Frankenstein segments through
//! those iterates so that the gradient at each iterate is exactly the chosen
//! value. The method then reproduces its marching sequence on a function that
//! is bounded below, while `F(θ_k) ≥ (θ_k - θ_0)/2` grows without bound.

pub mod frankenstein;
pub mod piecewise;

pub use frankenstein::{frankenstein_derivative, frankenstein_eval, FrankensteinParams, Side};
pub use piecewise::{build_divergence_objective, BreakpointSource, PiecewiseObjective};

use crate::baselines::{diminishing_factor, Baseline, BaselineSpec, Method};
use crate::error::{Error, Result};
use crate::problem::DifferentiableProblem;

const SQRT_5: f64 = 2.236_067_977_499_79;

/// Closed-form adversarial sequences for one method.
///
/// `d(k)` is the slope target at the k-th iterate (the objective has gradient
/// `-d(k)` there) and `theta(k)` is the iterate the method produces when it
/// observes those gradients from `θ_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarialRow {
    pub method: Method,
    pub step_param: f64,
}

impl AdversarialRow {
    pub fn d(&self, k: usize) -> f64 {
        match self.method {
            Method::BarzilaiBorweinLong | Method::BarzilaiBorweinShort => 0.5f64.powi(k as i32),
            Method::LipschitzApprox => (SQRT_5 / (SQRT_5 - 1.0)).powi(k as i32),
            _ => 1.0,
        }
    }

    pub fn theta(&self, k: usize) -> f64 {
        let a = self.step_param;
        match self.method {
            Method::FixedStep => k as f64 * a,
            Method::DiminishingStep => a * (0..k).map(diminishing_factor).sum::<f64>(),
            Method::BarzilaiBorweinLong | Method::BarzilaiBorweinShort => a * k as f64,
            Method::LipschitzApprox => {
                let r: f64 = SQRT_5 / 2.0;
                a * (0..k).map(|j| r.powi(j as i32)).sum::<f64>()
            }
            Method::WNGrad => {
                // theta_{k+1} = theta_k + 1/mu_k, mu_{k+1} = mu_k + 1/mu_k (unit gradients).
                let mut mu = 1.0 / a;
                let mut theta = 0.0;
                for _ in 0..k {
                    theta += 1.0 / mu;
                    mu += 1.0 / mu;
                }
                theta
            }
            Method::NesterovAccelerated => unreachable!("rejected by adversarial_row"),
        }
    }
}

/// The adversarial parameterization for `method`, if it has one.
pub fn adversarial_row(method: Method, step_param: f64) -> Result<AdversarialRow> {
    if method == Method::NesterovAccelerated {
        return Err(Error::UnsupportedMethod(method.name().to_string()));
    }
    if !(step_param > 0.0 && step_param.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step_param",
            reason: format!("must be positive and finite, got {step_param}"),
        });
    }
    Ok(AdversarialRow { method, step_param })
}

/// Builds the divergence objective for a row by driving the method's own update
/// with the engineered gradients `-d(k)`; breakpoints are its iterates.
pub fn divergence_objective(row: &AdversarialRow) -> Result<PiecewiseObjective> {
    let spec = BaselineSpec::new(row.method, row.step_param, usize::MAX, 0.0)?;
    let mut driver = Baseline::new(spec, &[0.0]);
    let row = *row;
    let mut next = 0usize;
    PiecewiseObjective::from_source(Box::new(move |j| {
        debug_assert_eq!(j, next);
        let phi = driver.iterate()[0];
        let d = row.d(j);
        driver.advance(&[-d]);
        next += 1;
        (phi.is_finite() && d.is_finite()).then_some((phi, d))
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntiConvergenceStep {
    pub k: usize,
    pub theta: f64,
    pub closed_form: f64,
    pub objective: f64,
    pub gradient: f64,
    /// `sum m_j (1 + |d_j| + |d_{j+1}|)` over the segments left of `theta`; the
    /// size of the terms whose rounding reaches `objective`.
    pub rounding_scale: f64,
}

#[derive(Debug, Clone)]
pub struct AntiConvergenceReport {
    pub row: AdversarialRow,
    pub phi0: f64,
    pub min_abs_d: f64,
    pub steps: Vec<AntiConvergenceStep>,
}

/// Relative tolerance for matching the closed-form iterates.
pub const ITERATE_RTOL: f64 = 1e-9;
/// Slack on the growth bound in units of `EPSILON * rounding_scale`. The bound
/// holds with equality on segments with `d, delta >= 1`, so only rounding is
/// tolerated.
pub const GROWTH_ROUNDING_ULPS: f64 = 8.0;

/// Runs the real baseline on its divergence objective for `horizon` updates and
/// checks iterate agreement, the growth bound and the gradient floor.
pub fn verify_anti_convergence(
    method: Method,
    step_param: f64,
    horizon: usize,
) -> Result<AntiConvergenceReport> {
    let report = trace_anti_convergence(method, step_param, horizon)?;
    for s in &report.steps {
        let err = (s.theta - s.closed_form).abs();
        if err > ITERATE_RTOL * s.closed_form.abs() {
            return Err(Error::VerificationFailed {
                k: s.k,
                reason: format!(
                    "iterate {} differs from closed form {}",
                    s.theta, s.closed_form
                ),
            });
        }
        let bound = (s.theta - report.phi0) / 2.0;
        let slack = GROWTH_ROUNDING_ULPS * f64::EPSILON * s.rounding_scale.max(1.0);
        if s.objective < bound - slack {
            return Err(Error::VerificationFailed {
                k: s.k,
                reason: format!("F = {} below growth bound {}", s.objective, bound),
            });
        }
        if s.gradient.abs() < report.min_abs_d {
            return Err(Error::VerificationFailed {
                k: s.k,
                reason: format!(
                    "|F'| = {} below floor {}",
                    s.gradient.abs(),
                    report.min_abs_d
                ),
            });
        }
    }
    Ok(report)
}

/// Same run as [`verify_anti_convergence`] without the assertions.
pub fn trace_anti_convergence(
    method: Method,
    step_param: f64,
    horizon: usize,
) -> Result<AntiConvergenceReport> {
    let row = adversarial_row(method, step_param)?;
    let objective = divergence_objective(&row)?;
    let spec = BaselineSpec::new(method, step_param, horizon, 0.0)?;
    let mut baseline = Baseline::new(spec, &[0.0]);
    let mut steps = Vec::with_capacity(horizon + 1);
    for k in 0..=horizon {
        let theta = baseline.iterate()[0];
        let grad = objective.gradient(baseline.query_point());
        steps.push(AntiConvergenceStep {
            k,
            theta,
            closed_form: row.theta(k),
            objective: objective.objective(&[theta]),
            gradient: objective.gradient(&[theta])[0],
            rounding_scale: 0.0,
        });
        if k < horizon {
            baseline.advance(&grad);
        }
    }
    let (phis, ds) = (objective.breakpoints(), objective.derivative_targets());
    for s in &mut steps {
        s.rounding_scale = (0..phis.len() - 1)
            .take_while(|&j| phis[j + 1] <= s.theta)
            .map(|j| (phis[j + 1] - phis[j]) * (1.0 + ds[j].abs() + ds[j + 1].abs()))
            .sum();
    }
    let min_abs_d = (0..=horizon)
        .map(|k| row.d(k).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(AntiConvergenceReport {
        row,
        phi0: objective.breakpoints()[0],
        min_abs_d,
        steps,
    })
}
