//! The evaluation interface shared by every solver, plus instrumentation.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::linalg;

/// A smooth unconstrained objective `F: R^n -> R` with an analytic gradient.
///
/// Objective values may be NaN (restricted domains, failed quadrature); solvers
/// propagate NaN rather than clamping it.
pub trait DifferentiableProblem {
    fn dimension(&self) -> usize;

    fn objective(&self, theta: &[f64]) -> f64;

    /// Writes the gradient at `theta` into `out` (`out.len() == dimension()`).
    fn gradient_into(&self, theta: &[f64], out: &mut [f64]);

    fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.gradient_into(theta, &mut out);
        out
    }
}

impl<P: DifferentiableProblem + ?Sized> DifferentiableProblem for &P {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn objective(&self, theta: &[f64]) -> f64 {
        (**self).objective(theta)
    }
    fn gradient_into(&self, theta: &[f64], out: &mut [f64]) {
        (**self).gradient_into(theta, out)
    }
}

/// Wraps a problem and counts objective and gradient evaluations.
///
/// Counters live in the wrapper, so one instance corresponds to one run.
pub struct Counted<P> {
    inner: P,
    objective_evals: Cell<u64>,
    gradient_evals: Cell<u64>,
}

impl<P: DifferentiableProblem> Counted<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            objective_evals: Cell::new(0),
            gradient_evals: Cell::new(0),
        }
    }

    pub fn objective_eval_count(&self) -> u64 {
        self.objective_evals.get()
    }

    pub fn gradient_eval_count(&self) -> u64 {
        self.gradient_evals.get()
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: DifferentiableProblem> DifferentiableProblem for Counted<P> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn objective(&self, theta: &[f64]) -> f64 {
        self.objective_evals.set(self.objective_evals.get() + 1);
        self.inner.objective(theta)
    }

    fn gradient_into(&self, theta: &[f64], out: &mut [f64]) {
        self.gradient_evals.set(self.gradient_evals.get() + 1);
        self.inner.gradient_into(theta, out);
        debug_assert_eq!(out.len(), self.inner.dimension());
    }
}

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    GradientTolerance,
    IterationBudget,
    NonFiniteValue,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::GradientTolerance => "gradient-tolerance",
            Termination::IterationBudget => "iteration-budget",
            Termination::NonFiniteValue => "non-finite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub index: usize,
    /// Present only when the solver evaluated the objective at this iterate.
    pub objective: Option<f64>,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub final_iterate: Vec<f64>,
    /// Objective at `final_iterate`, when the solver itself evaluated it.
    pub final_objective: Option<f64>,
    pub final_grad_norm: f64,
    /// Outer-loop count (event-driven) or number of updates (baselines).
    pub iterations: usize,
    /// Total gradient steps taken (inner steps for the event-driven solver).
    pub gradient_steps: usize,
    pub objective_evals: u64,
    pub gradient_evals: u64,
    pub trace: Vec<TraceEntry>,
    pub termination: Termination,
}

impl SolveReport {
    pub fn initial_grad_norm(&self) -> f64 {
        self.trace.first().map_or(f64::NAN, |t| t.grad_norm)
    }

    pub fn initial_objective(&self) -> Option<f64> {
        self.trace.first().and_then(|t| t.objective)
    }
}

/// Central-difference approximation of the gradient with step `h`.
///
/// Component `i` is `[F(x + h e_i) - F(x - h e_i)] / (2h)`.
pub fn finite_difference_gradient<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    point: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    let n = problem.dimension();
    if point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: point.len(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "h",
            reason: format!("step must be positive and finite, got {h}"),
        });
    }
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(n);
    for i in 0..n {
        let xi = x[i];
        x[i] = xi + h;
        let fp = problem.objective(&x);
        x[i] = xi - h;
        let fm = problem.objective(&x);
        x[i] = xi;
        if !fp.is_finite() {
            return Err(Error::NonFiniteObjective { index: 2 * i });
        }
        if !fm.is_finite() {
            return Err(Error::NonFiniteObjective { index: 2 * i + 1 });
        }
        grad.push((fp - fm) / (2.0 * h));
    }
    Ok(grad)
}

/// `||a - b|| / ||b||`, with the denominator floored at `floor`.
pub fn relative_error(approx: &[f64], exact: &[f64], floor: f64) -> f64 {
    let diff = linalg::distance(approx, exact);
    diff / linalg::norm(exact).max(floor)
}

/// Closure-backed problem, mostly for tests and quick experiments.
pub struct FnProblem<F, G> {
    dimension: usize,
    objective: F,
    gradient: G,
}

impl<F, G> FnProblem<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    pub fn new(dimension: usize, objective: F, gradient: G) -> Self {
        Self {
            dimension,
            objective,
            gradient,
        }
    }
}

impl<F, G> DifferentiableProblem for FnProblem<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn objective(&self, theta: &[f64]) -> f64 {
        (self.objective)(theta)
    }
    fn gradient_into(&self, theta: &[f64], out: &mut [f64]) {
        (self.gradient)(theta, out)
    }
}

/// `F(θ) = ½ Σ c_i θ_i²`, a separable quadratic used throughout the tests.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub curvature: Vec<f64>,
}

impl Quadratic {
    pub fn isotropic(n: usize) -> Self {
        Self {
            curvature: vec![1.0; n],
        }
    }
}

impl DifferentiableProblem for Quadratic {
    fn dimension(&self) -> usize {
        self.curvature.len()
    }
    fn objective(&self, theta: &[f64]) -> f64 {
        0.5 * self
            .curvature
            .iter()
            .zip(theta)
            .map(|(c, t)| c * t * t)
            .sum::<f64>()
    }
    fn gradient_into(&self, theta: &[f64], out: &mut [f64]) {
        for ((o, c), t) in out.iter_mut().zip(&self.curvature).zip(theta) {
            *o = c * t;
        }
    }
}
