//! Gradient descent with event-driven objective evaluations.
//!
//! Each outer iteration runs an inner loop of adaptive gradient steps that never
//! touches the objective. The inner loop stops at the first *triggering event*:
//! the iterate leaves a ball around the outer iterate, its gradient norm exits
//! the band `(tau_low, tau_up)`, or the inner iteration cap is hit. The terminal
//! inner iterate is then evaluated once and accepted only if it satisfies the
//! non-sequential Armijo condition
//!
//! ```text
//! F(psi) < F(theta_k) - rho * delta_k * alpha0_k * ||grad F(theta_k)||^2
//! ```
//!
//! Rejection restarts from `theta_k` with `delta` halved. Consequently every run
//! evaluates the objective exactly once at initialization and once per outer
//! iteration.

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{Counted, DifferentiableProblem, SolveReport, Termination, TraceEntry};

/// Numerical floor added to the step-size constants.
pub const STEP_FLOOR: f64 = 1e-16;
/// Smallest step size the rule can produce.
pub const MIN_STEP: f64 = STEP_FLOOR;
/// Largest step size the rule can produce.
pub const MAX_STEP: f64 = STEP_FLOOR + 1.0 / STEP_FLOOR;

const SQRT_10: f64 = 3.162_277_660_168_379_5;
const SQRT_20: f64 = 4.472_135_954_999_579;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Outer stopping tolerance on `||grad F(theta_k)||`.
    pub epsilon: f64,
    /// Armijo relaxation, in (0, 1).
    pub rho: f64,
    /// Cap on the step scaling `delta`.
    pub delta_bar: f64,
    /// Initial scaling, in (0, delta_bar].
    pub delta0: f64,
    /// Radius of the trust ball around the outer iterate.
    pub radius: f64,
    /// Inner iterations before a forced evaluation.
    pub max_inner: usize,
    /// Maximum number of outer iterations.
    pub outer_budget: usize,
    /// Optional cap on the total number of inner gradient steps across the run.
    pub step_budget: Option<usize>,
}

impl SolverParams {
    pub fn new(epsilon: f64, rho: f64, delta_bar: f64, delta0: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            rho,
            delta_bar,
            delta0,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.epsilon > 0.0) {
            return bad("epsilon", "must be positive");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho", "must lie in (0, 1)");
        }
        if !(self.delta_bar > 0.0 && self.delta_bar.is_finite()) {
            return bad("delta_bar", "must be positive and finite");
        }
        if !(self.delta0 > 0.0 && self.delta0 <= self.delta_bar) {
            return bad("delta0", "must lie in (0, delta_bar]");
        }
        if !(self.radius > 0.0) {
            return bad("radius", "must be positive");
        }
        if self.max_inner == 0 {
            return bad("max_inner", "must be at least 1");
        }
        if self.outer_budget == 0 {
            return bad("outer_budget", "must be at least 1");
        }
        Ok(())
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            rho: 1e-4,
            delta_bar: 1.0,
            delta0: 1.0,
            radius: 10.0,
            max_inner: 100,
            outer_budget: 100_000,
            step_budget: None,
        }
    }
}

/// Which clause of the triggering disjunction fired (checked left to right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriggerReason {
    RadiusExceeded,
    GradientOutsideBand,
    MaxInnerIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AcceptDecision {
    Rejected,
    AcceptedLowGradient,
    AcceptedHighGradient,
    AcceptedInterior,
}

impl AcceptDecision {
    pub fn is_accepted(self) -> bool {
        self != AcceptDecision::Rejected
    }
}

/// Per-outer-iteration solver state.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterState {
    pub theta: Vec<f64>,
    pub delta: f64,
    pub tau_low: f64,
    pub tau_up: f64,
    pub lipschitz_estimate: f64,
    pub objective_at_theta: f64,
    pub grad_at_theta: Vec<f64>,
    pub k: usize,
    /// True when the previous outer iteration rejected (so `theta_k == theta_{k-1}`).
    pub last_rejected: bool,
}

impl OuterState {
    /// Initial state: `tau_low = ||g0|| / sqrt(2)`, `tau_up = sqrt(10) ||g0||`.
    pub fn initial(theta0: Vec<f64>, objective: f64, grad: Vec<f64>, delta0: f64) -> Self {
        let gn = linalg::norm(&grad);
        Self {
            theta: theta0,
            delta: delta0,
            tau_low: gn / std::f64::consts::SQRT_2,
            tau_up: SQRT_10 * gn,
            lipschitz_estimate: 1.0,
            objective_at_theta: objective,
            grad_at_theta: grad,
            k: 0,
            last_rejected: false,
        }
    }

    pub fn grad_norm(&self) -> f64 {
        linalg::norm(&self.grad_at_theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerLoopResult {
    pub terminal_psi: Vec<f64>,
    pub terminal_grad: Vec<f64>,
    pub j_terminal: usize,
    pub alpha0: f64,
    pub trigger: TriggerReason,
    pub lipschitz_estimate_out: f64,
    /// `max_{j < j_terminal} ||psi_j - theta_k||`.
    pub max_interior_distance: f64,
    /// `max_{j < j_terminal} ||grad F(psi_j)||`.
    pub max_interior_grad_norm: f64,
}

/// Adaptive step size
/// `min(tau_low^2 / C1, 1 / C2) + 1e-16` with
/// `C1 = g^3 + g^2 L / 2 + 1e-16`, `C2 = g + L / 2 + 1e-16`.
pub fn compute_step_size(grad_norm: f64, lipschitz_estimate: f64, tau_low: f64) -> f64 {
    let g = grad_norm;
    let l = lipschitz_estimate;
    let c1 = g * g * g + 0.5 * g * g * l + STEP_FLOOR;
    let c2 = g + 0.5 * l + STEP_FLOOR;
    (tau_low * tau_low / c1).min(1.0 / c2) + STEP_FLOOR
}

/// Evaluates the triggering disjunction at inner iterate `psi`; `max_inner` is
/// the effective inner cap for this loop.
#[allow(clippy::too_many_arguments)]
pub fn check_trigger(
    psi: &[f64],
    theta: &[f64],
    grad_norm_at_psi: f64,
    j: usize,
    radius: f64,
    max_inner: usize,
    tau_low: f64,
    tau_up: f64,
) -> Option<TriggerReason> {
    if linalg::distance(psi, theta) > radius {
        Some(TriggerReason::RadiusExceeded)
    } else if !(grad_norm_at_psi > tau_low && grad_norm_at_psi < tau_up) {
        Some(TriggerReason::GradientOutsideBand)
    } else if j == max_inner {
        Some(TriggerReason::MaxInnerIterations)
    } else {
        None
    }
}

/// Secant-based local Lipschitz estimate.
///
/// `j == 0` starts a new inner loop (1 on the very first, otherwise the previous
/// loop's final value). For `j > 0` the secant ratio is used directly, or maxed
/// with `prev_estimate` when the previous outer iteration was a rejection.
#[allow(clippy::too_many_arguments)]
pub fn update_lipschitz_estimate(
    j: usize,
    k: usize,
    psi_j: &[f64],
    psi_prev: &[f64],
    grad_j: &[f64],
    grad_prev: &[f64],
    prev_estimate: f64,
    last_outer_rejected: bool,
) -> Result<f64> {
    if j == 0 {
        return Ok(if k == 0 { 1.0 } else { prev_estimate });
    }
    let step = linalg::distance(psi_j, psi_prev);
    if step == 0.0 {
        return Err(Error::DivisionByZero);
    }
    let ratio = linalg::distance(grad_j, grad_prev) / step;
    Ok(if last_outer_rejected {
        ratio.max(prev_estimate)
    } else {
        ratio
    })
}

/// Applies the accept/reject branch after a trigger.
pub fn resolve_trigger(
    state: OuterState,
    result: InnerLoopResult,
    objective_at_psi: f64,
    params: &SolverParams,
) -> Result<(OuterState, AcceptDecision)> {
    if !state.objective_at_theta.is_finite() {
        return Err(Error::NonFiniteState);
    }
    let gn_theta = state.grad_norm();
    let threshold =
        state.objective_at_theta - params.rho * state.delta * result.alpha0 * gn_theta * gn_theta;
    let mut next = state;
    next.k += 1;
    next.lipschitz_estimate = result.lipschitz_estimate_out;

    // NaN fails the strict descent test.
    if !(objective_at_psi < threshold) {
        next.delta *= 0.5;
        next.last_rejected = true;
        return Ok((next, AcceptDecision::Rejected));
    }

    let gn_psi = linalg::norm(&result.terminal_grad);
    let decision = if gn_psi <= next.tau_low {
        AcceptDecision::AcceptedLowGradient
    } else if gn_psi >= next.tau_up {
        AcceptDecision::AcceptedHighGradient
    } else {
        AcceptDecision::AcceptedInterior
    };
    if decision != AcceptDecision::AcceptedLowGradient {
        next.delta = (1.5 * next.delta).min(params.delta_bar);
    }
    if decision != AcceptDecision::AcceptedInterior {
        next.tau_low = gn_psi / std::f64::consts::SQRT_2;
        next.tau_up = SQRT_20 * next.tau_low;
    }
    next.theta = result.terminal_psi;
    next.grad_at_theta = result.terminal_grad;
    next.objective_at_theta = objective_at_psi;
    next.last_rejected = false;
    Ok((next, decision))
}

/// Hooks for instrumenting a run without touching the solver.
pub trait SolveObserver {
    fn on_step_size(&mut self, _alpha: f64) {}
    fn on_outer(&mut self, _event: &OuterEvent<'_>) {}
}

impl SolveObserver for () {}

/// Everything known about one completed outer iteration.
#[derive(Debug)]
pub struct OuterEvent<'a> {
    pub before: &'a OuterState,
    pub after: &'a OuterState,
    pub inner: &'a InnerLoopResult,
    pub objective_at_psi: f64,
    pub decision: AcceptDecision,
}

/// Counts step sizes falling outside `[MIN_STEP, MAX_STEP]`.
#[derive(Debug, Clone, Copy)]
pub struct StepBoundsMonitor {
    pub count: u64,
    pub violations: u64,
    pub min: f64,
    pub max: f64,
}

impl Default for StepBoundsMonitor {
    fn default() -> Self {
        Self {
            count: 0,
            violations: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl SolveObserver for StepBoundsMonitor {
    fn on_step_size(&mut self, alpha: f64) {
        self.count += 1;
        self.min = self.min.min(alpha);
        self.max = self.max.max(alpha);
        if !(MIN_STEP..=MAX_STEP).contains(&alpha) {
            self.violations += 1;
        }
    }
}

/// Runs adaptive gradient steps from `state.theta` until a trigger fires.
///
/// `step_cap` bounds the inner loop below `params.max_inner` when a global
/// step budget is nearly spent. The trigger is checked at `j = 1, 2, ...`;
/// `psi_0 = theta_k` is never tested.
pub fn run_inner_loop<P, O>(
    problem: &P,
    state: &OuterState,
    params: &SolverParams,
    step_cap: usize,
    observer: &mut O,
) -> Result<InnerLoopResult>
where
    P: DifferentiableProblem + ?Sized,
    O: SolveObserver + ?Sized,
{
    let cap = step_cap.min(params.max_inner).max(1);
    let mut psi = state.theta.clone();
    let mut grad = state.grad_at_theta.clone();
    let mut grad_norm = linalg::norm(&grad);
    let mut lipschitz = update_lipschitz_estimate(
        0,
        state.k,
        &psi,
        &psi,
        &grad,
        &grad,
        state.lipschitz_estimate,
        state.last_rejected,
    )?;
    let alpha0 = compute_step_size(grad_norm, lipschitz, state.tau_low);
    observer.on_step_size(alpha0);
    let mut alpha = alpha0;

    let mut max_dist: f64 = 0.0;
    let mut max_grad: f64 = grad_norm;
    let mut next_psi = vec![0.0; psi.len()];
    let mut next_grad = vec![0.0; psi.len()];
    let mut j = 0usize;
    loop {
        if j > 0 {
            alpha = compute_step_size(grad_norm, lipschitz, state.tau_low);
            observer.on_step_size(alpha);
            if let Some(trigger) = check_trigger(
                &psi,
                &state.theta,
                grad_norm,
                j,
                params.radius,
                cap,
                state.tau_low,
                state.tau_up,
            ) {
                return Ok(InnerLoopResult {
                    terminal_psi: psi,
                    terminal_grad: grad,
                    j_terminal: j,
                    alpha0,
                    trigger,
                    lipschitz_estimate_out: lipschitz,
                    max_interior_distance: max_dist,
                    max_interior_grad_norm: max_grad,
                });
            }
            max_dist = max_dist.max(linalg::distance(&psi, &state.theta));
            max_grad = max_grad.max(grad_norm);
        }

        next_psi.copy_from_slice(&psi);
        linalg::axpy(-state.delta * alpha, &grad, &mut next_psi);
        problem.gradient_into(&next_psi, &mut next_grad);
        if !linalg::all_finite(&next_grad) {
            return Err(Error::NonFiniteGradient);
        }
        lipschitz = match update_lipschitz_estimate(
            j + 1,
            state.k,
            &next_psi,
            &psi,
            &next_grad,
            &grad,
            lipschitz,
            state.last_rejected,
        ) {
            Ok(l) => l,
            // The step vanished in floating point; keep the current estimate.
            Err(Error::DivisionByZero) => lipschitz,
            Err(e) => return Err(e),
        };
        std::mem::swap(&mut psi, &mut next_psi);
        std::mem::swap(&mut grad, &mut next_grad);
        grad_norm = linalg::norm(&grad);
        j += 1;
    }
}

/// Event-driven gradient descent from `theta0`.
pub fn solve<P>(problem: &P, theta0: &[f64], params: &SolverParams) -> Result<SolveReport>
where
    P: DifferentiableProblem + ?Sized,
{
    solve_observed(problem, theta0, params, &mut ())
}

pub fn solve_observed<P, O>(
    problem: &P,
    theta0: &[f64],
    params: &SolverParams,
    observer: &mut O,
) -> Result<SolveReport>
where
    P: DifferentiableProblem + ?Sized,
    O: SolveObserver + ?Sized,
{
    params.validate()?;
    let n = problem.dimension();
    if theta0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: theta0.len(),
        });
    }
    let counted = Counted::new(problem);
    let grad0 = counted.gradient(theta0);
    let f0 = counted.objective(theta0);
    let mut state = OuterState::initial(theta0.to_vec(), f0, grad0, params.delta0);
    let mut trace = vec![TraceEntry {
        index: 0,
        objective: Some(f0),
        grad_norm: state.grad_norm(),
    }];
    let mut steps_used = (counted.gradient_eval_count() - 1) as usize;

    let termination = loop {
        let gn = state.grad_norm();
        if !gn.is_finite() || !state.objective_at_theta.is_finite() {
            break Termination::NonFiniteValue;
        }
        if gn <= params.epsilon {
            break Termination::GradientTolerance;
        }
        if state.k >= params.outer_budget {
            break Termination::IterationBudget;
        }
        let remaining = match params.step_budget {
            Some(b) if steps_used >= b => break Termination::IterationBudget,
            Some(b) => b - steps_used,
            None => usize::MAX,
        };
        let before_steps = counted.gradient_eval_count();
        let inner = match run_inner_loop(&counted, &state, params, remaining, observer) {
            Ok(r) => r,
            Err(_) => {
                steps_used += (counted.gradient_eval_count() - before_steps) as usize;
                break Termination::NonFiniteValue;
            }
        };
        steps_used += (counted.gradient_eval_count() - before_steps) as usize;
        let f_psi = counted.objective(&inner.terminal_psi);
        let before = state.clone();
        let (after, decision) = resolve_trigger(state, inner.clone(), f_psi, params)?;
        observer.on_outer(&OuterEvent {
            before: &before,
            after: &after,
            inner: &inner,
            objective_at_psi: f_psi,
            decision,
        });
        state = after;
        trace.push(TraceEntry {
            index: state.k,
            objective: Some(state.objective_at_theta),
            grad_norm: state.grad_norm(),
        });
    };

    Ok(SolveReport {
        final_grad_norm: state.grad_norm(),
        final_objective: Some(state.objective_at_theta),
        final_iterate: state.theta,
        iterations: state.k,
        gradient_steps: steps_used,
        objective_evals: counted.objective_eval_count(),
        gradient_evals: counted.gradient_eval_count(),
        trace,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{FnProblem, Quadratic};

    fn params() -> SolverParams {
        SolverParams::new(1e-3, 1e-4, 1.0, 1.0).unwrap()
    }

    fn state_with(theta: f64, f: f64, g: f64, delta: f64, tau: (f64, f64)) -> OuterState {
        OuterState {
            theta: vec![theta],
            delta,
            tau_low: tau.0,
            tau_up: tau.1,
            lipschitz_estimate: 1.0,
            objective_at_theta: f,
            grad_at_theta: vec![g],
            k: 3,
            last_rejected: false,
        }
    }

    fn inner(psi: f64, g: f64, alpha0: f64) -> InnerLoopResult {
        InnerLoopResult {
            terminal_psi: vec![psi],
            terminal_grad: vec![g],
            j_terminal: 1,
            alpha0,
            trigger: TriggerReason::RadiusExceeded,
            lipschitz_estimate_out: 2.0,
            max_interior_distance: 0.0,
            max_interior_grad_norm: 0.0,
        }
    }

    #[test]
    fn step_size_lower_bound_at_zero_gradient() {
        assert_eq!(compute_step_size(0.0, 0.0, 0.0), 1e-16);
    }

    #[test]
    fn step_size_hand_values() {
        // min(0.5 / 1.5, 1 / 1.5) + 1e-16
        let a = compute_step_size(1.0, 1.0, 1.0 / 2f64.sqrt());
        assert!((a - 1.0 / 3.0).abs() < 1e-15);
        // min(2 / 8, 1 / 2) + 1e-16
        let b = compute_step_size(2.0, 0.0, 2f64.sqrt());
        assert!((b - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trigger_clauses_in_order() {
        let t = [0.0];
        assert_eq!(
            check_trigger(&[11.0], &t, 1.0, 1, 10.0, 100, 0.5, 2.0),
            Some(TriggerReason::RadiusExceeded)
        );
        assert_eq!(
            check_trigger(&[0.0], &t, 0.5, 1, 10.0, 100, 0.5, 2.0),
            Some(TriggerReason::GradientOutsideBand)
        );
        assert_eq!(
            check_trigger(&[0.0], &t, 2.0, 1, 10.0, 100, 0.5, 2.0),
            Some(TriggerReason::GradientOutsideBand)
        );
        assert_eq!(
            check_trigger(&[1.0], &t, 1.0, 100, 10.0, 100, 0.5, 2.0),
            Some(TriggerReason::MaxInnerIterations)
        );
        assert_eq!(
            check_trigger(&[1.0], &t, 1.0, 99, 10.0, 100, 0.5, 2.0),
            None
        );
        // Exactly on the radius does not trigger.
        assert_eq!(
            check_trigger(&[10.0], &t, 1.0, 1, 10.0, 100, 0.5, 2.0),
            None
        );
    }

    #[test]
    fn reject_halves_delta_and_keeps_everything_else() {
        let s = state_with(0.0, 10.0, 1.0, 1.0, (0.5, 2.0));
        let (next, d) = resolve_trigger(s.clone(), inner(5.0, 0.1, 1.0), 10.0, &params()).unwrap();
        assert_eq!(d, AcceptDecision::Rejected);
        assert_eq!(next.delta, 0.5);
        assert_eq!(next.theta, s.theta);
        assert_eq!(next.tau_low.to_bits(), s.tau_low.to_bits());
        assert_eq!(next.tau_up.to_bits(), s.tau_up.to_bits());
        assert_eq!(next.k, 4);
        assert!(next.last_rejected);
    }

    #[test]
    fn nan_objective_rejects() {
        let s = state_with(0.0, 10.0, 1.0, 1.0, (0.5, 2.0));
        let (_, d) = resolve_trigger(s, inner(5.0, 0.1, 1.0), f64::NAN, &params()).unwrap();
        assert_eq!(d, AcceptDecision::Rejected);
    }

    #[test]
    fn nonfinite_state_is_an_error() {
        let s = state_with(0.0, f64::NAN, 1.0, 1.0, (0.5, 2.0));
        assert_eq!(
            resolve_trigger(s, inner(5.0, 0.1, 1.0), 1.0, &params()),
            Err(Error::NonFiniteState)
        );
    }

    #[test]
    fn accept_low_gradient_resets_band() {
        let s = state_with(0.0, 10.0, 1.0, 0.8, (0.5, 2.0));
        let (next, d) = resolve_trigger(s, inner(5.0, 0.25, 1.0), 5.0, &params()).unwrap();
        assert_eq!(d, AcceptDecision::AcceptedLowGradient);
        assert_eq!(next.delta, 0.8);
        assert_eq!(next.theta, vec![5.0]);
        assert!((next.tau_up / next.tau_low - 20f64.sqrt()).abs() < 1e-14);
        assert_eq!(next.objective_at_theta, 5.0);
    }

    #[test]
    fn accept_high_gradient_grows_delta() {
        let s = state_with(0.0, 10.0, 1.0, 0.5, (0.5, 2.0));
        let (next, d) = resolve_trigger(s, inner(5.0, 3.0, 1.0), 5.0, &params()).unwrap();
        assert_eq!(d, AcceptDecision::AcceptedHighGradient);
        assert_eq!(next.delta, 0.75);
        assert!((next.tau_low - 3.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn accept_interior_caps_delta_and_carries_band() {
        let s = state_with(0.0, 10.0, 1.0, 0.9, (0.5, 2.0));
        let (next, d) = resolve_trigger(s, inner(5.0, 1.0, 1.0), 5.0, &params()).unwrap();
        assert_eq!(d, AcceptDecision::AcceptedInterior);
        assert_eq!(next.delta, 1.0);
        assert_eq!(next.tau_low, 0.5);
        assert_eq!(next.tau_up, 2.0);
    }

    #[test]
    fn lipschitz_update_branches() {
        let z = [0.0];
        assert_eq!(
            update_lipschitz_estimate(0, 0, &z, &z, &z, &z, 7.0, false),
            Ok(1.0)
        );
        assert_eq!(
            update_lipschitz_estimate(0, 4, &z, &z, &z, &z, 7.0, true),
            Ok(7.0)
        );
        assert_eq!(
            update_lipschitz_estimate(1, 2, &[1.0], &[0.0], &[2.0], &[0.0], 5.0, false),
            Ok(2.0)
        );
        assert_eq!(
            update_lipschitz_estimate(1, 2, &[1.0], &[0.0], &[2.0], &[0.0], 5.0, true),
            Ok(5.0)
        );
        assert_eq!(
            update_lipschitz_estimate(1, 2, &[1.0], &[1.0], &[2.0], &[0.0], 5.0, true),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn params_validation() {
        assert!(SolverParams::new(1e-3, 1.0, 1.0, 1.0).is_err());
        assert!(SolverParams::new(1e-3, 0.5, 1.0, 1.5).is_err());
        assert!(SolverParams::new(0.0, 0.5, 1.0, 1.0).is_err());
        let p = SolverParams {
            max_inner: 0,
            ..SolverParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn immediate_return_when_already_stationary() {
        let r = solve(&Quadratic::isotropic(2), &[1e-5, 0.0], &params()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.objective_evals, 1);
        assert_eq!(r.termination, Termination::GradientTolerance);
    }

    #[test]
    fn linear_objective_exits_through_radius() {
        // F = 2 theta: gradient norm constant, so only the ball can trigger.
        let p = FnProblem::new(
            1,
            |t: &[f64]| 2.0 * t[0],
            |_: &[f64], g: &mut [f64]| g[0] = 2.0,
        );
        let st = OuterState::initial(vec![0.0], 0.0, vec![2.0], 1.0);
        let r = run_inner_loop(&p, &st, &params(), usize::MAX, &mut ()).unwrap();
        assert_eq!(r.trigger, TriggerReason::RadiusExceeded);
        // alpha is constant: min(2 / (8 + 2), 1 / (2 + 0.5)) + 1e-16 = 0.2 at j = 0 with L = 1,
        // then L = 0 for j >= 1: min(2 / 8, 1 / 2) = 0.25.
        // psi_1 = -0.4, then 0.5 per step: ||psi_j|| = 0.4 + 0.5 (j - 1) > 10 first at j = 21.
        assert_eq!(r.j_terminal, 21);
        assert!((r.terminal_psi[0] + 10.4).abs() < 1e-9);
    }

    #[test]
    fn single_inner_step_when_cap_is_one() {
        let p = Quadratic::isotropic(1);
        let st = OuterState::initial(vec![1.0], 0.5, vec![1.0], 1.0);
        let pr = SolverParams {
            max_inner: 1,
            ..params()
        };
        let r = run_inner_loop(&p, &st, &pr, usize::MAX, &mut ()).unwrap();
        assert_eq!(r.j_terminal, 1);
    }
}
