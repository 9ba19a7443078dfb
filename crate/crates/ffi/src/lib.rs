//! C ABI over `eventgd`.
//!
//! Problems and solve reports are opaque heap handles released with their
//! `*_free` function. Every fallible call returns an [`EgdStatus`]; on failure
//! a message is available from [`egd_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use eventgd::anticonv::{
    adversarial_row, divergence_objective, frankenstein_derivative, frankenstein_eval,
    FrankensteinParams, PiecewiseObjective, Side,
};
use eventgd::baselines::{solve_baseline, BaselineSpec, Method};
use eventgd::event_driven::{solve, SolverParams};
use eventgd::quasi_likelihood::{
    generate_dataset, DatasetSpec, QLProblem, QuadratureConfig, Variance,
};
use eventgd::{DifferentiableProblem, Error, SolveReport, Termination};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Numerical = 4,
    Unsupported = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgdMethod {
    Fixed = 0,
    Diminishing = 1,
    BbLong = 2,
    BbShort = 3,
    LipschitzApprox = 4,
    Nesterov = 5,
    Wngrad = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgdVariance {
    V1 = 1,
    V2 = 2,
    V3 = 3,
    V4 = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgdTermination {
    GradientTolerance = 0,
    IterationBudget = 1,
    NonFinite = 2,
}

/// Event-driven solver settings. `step_budget == 0` means no global budget.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EgdSolverParams {
    pub epsilon: f64,
    pub rho: f64,
    pub delta_bar: f64,
    pub delta0: f64,
    pub radius: f64,
    pub max_inner: usize,
    pub outer_budget: usize,
    pub step_budget: usize,
}

/// Objective callback: `theta` has `n` entries.
pub type EgdObjectiveFn =
    Option<unsafe extern "C" fn(theta: *const f64, n: usize, user: *mut c_void) -> f64>;
/// Gradient callback: writes `n` entries to `grad_out`.
pub type EgdGradientFn = Option<
    unsafe extern "C" fn(theta: *const f64, n: usize, grad_out: *mut f64, user: *mut c_void),
>;

struct Callback {
    n: usize,
    objective: unsafe extern "C" fn(*const f64, usize, *mut c_void) -> f64,
    gradient: unsafe extern "C" fn(*const f64, usize, *mut f64, *mut c_void),
    user: *mut c_void,
}

impl DifferentiableProblem for Callback {
    fn dimension(&self) -> usize {
        self.n
    }
    fn objective(&self, theta: &[f64]) -> f64 {
        // SAFETY: the registrant promised the callback reads `n` doubles.
        unsafe { (self.objective)(theta.as_ptr(), self.n, self.user) }
    }
    fn gradient_into(&self, theta: &[f64], out: &mut [f64]) {
        // SAFETY: as above, writing `n` doubles into `out`.
        unsafe { (self.gradient)(theta.as_ptr(), self.n, out.as_mut_ptr(), self.user) }
    }
}

enum Kind {
    Ql {
        problem: QLProblem,
        starts: Vec<Vec<f64>>,
    },
    Callback(Callback),
    Divergence(PiecewiseObjective),
}

/// Opaque problem handle.
pub struct EgdProblem {
    kind: Kind,
}

impl EgdProblem {
    fn inner(&self) -> &dyn DifferentiableProblem {
        match &self.kind {
            Kind::Ql { problem, .. } => problem,
            Kind::Callback(c) => c,
            Kind::Divergence(f) => f,
        }
    }
}

/// Opaque solve-report handle.
pub struct EgdReport {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: EgdStatus, msg: impl AsRef<str>) -> EgdStatus {
    set_error(msg.as_ref());
    status
}

fn status_of(e: &Error) -> EgdStatus {
    match e {
        Error::DimensionMismatch { .. } => EgdStatus::DimensionMismatch,
        Error::UnsupportedMethod(_) => EgdStatus::Unsupported,
        Error::NonFiniteObjective { .. }
        | Error::NonFiniteGradient
        | Error::NonFiniteState
        | Error::DivisionByZero
        | Error::QuadratureDepthExceeded { .. }
        | Error::VerificationFailed { .. } => EgdStatus::Numerical,
        _ => EgdStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), EgdStatus>) -> EgdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EgdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(EgdStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, EgdStatus>;
}

impl<T> OrStatus<T> for eventgd::Result<T> {
    fn or_status(self) -> Result<T, EgdStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), EgdStatus> {
    if p.is_null() {
        Err(fail(EgdStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

fn method_of(m: EgdMethod) -> Method {
    match m {
        EgdMethod::Fixed => Method::FixedStep,
        EgdMethod::Diminishing => Method::DiminishingStep,
        EgdMethod::BbLong => Method::BarzilaiBorweinLong,
        EgdMethod::BbShort => Method::BarzilaiBorweinShort,
        EgdMethod::LipschitzApprox => Method::LipschitzApprox,
        EgdMethod::Nesterov => Method::NesterovAccelerated,
        EgdMethod::Wngrad => Method::WNGrad,
    }
}

fn variance_of(v: EgdVariance) -> Variance {
    match v {
        EgdVariance::V1 => Variance::V1,
        EgdVariance::V2 => Variance::V2,
        EgdVariance::V3 => Variance::V3,
        EgdVariance::V4 => Variance::V4,
    }
}

/// # Safety
/// `theta` must point to `n` readable doubles.
unsafe fn point<'a>(p: &EgdProblem, theta: *const f64, n: usize) -> Result<&'a [f64], EgdStatus> {
    non_null(theta, "theta")?;
    let dim = p.inner().dimension();
    if n != dim {
        return Err(fail(
            EgdStatus::DimensionMismatch,
            format!("expected {dim} coordinates, got {n}"),
        ));
    }
    Ok(std::slice::from_raw_parts(theta, n))
}

/// # Safety
/// `out` must be non-null and writable.
unsafe fn into_handle<T>(value: T, out: *mut *mut T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn egd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn egd_solver_params_default() -> EgdSolverParams {
    let p = SolverParams::default();
    EgdSolverParams {
        epsilon: p.epsilon,
        rho: p.rho,
        delta_bar: p.delta_bar,
        delta0: p.delta0,
        radius: p.radius,
        max_inner: p.max_inner,
        outer_budget: p.outer_budget,
        step_budget: 0,
    }
}

/// Generates a seeded quasi-likelihood dataset with `num_starts` starting
/// points and wraps it as a problem of dimension `n`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn egd_ql_problem_new(
    variance: EgdVariance,
    n: usize,
    m: usize,
    seed: u64,
    num_starts: usize,
    out: *mut *mut EgdProblem,
) -> EgdStatus {
    guard(|| {
        non_null(out, "out")?;
        let spec = DatasetSpec {
            num_starts,
            ..DatasetSpec::new(n, m, variance_of(variance), seed)
        };
        let data = generate_dataset(&spec).or_status()?;
        let problem = data
            .problem(variance_of(variance), QuadratureConfig::default())
            .or_status()?;
        into_handle(
            EgdProblem {
                kind: Kind::Ql {
                    problem,
                    starts: data.starts,
                },
            },
            out,
        );
        Ok(())
    })
}

/// Copies starting point `index` of a quasi-likelihood problem into `buf`.
///
/// # Safety
/// `problem` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn egd_ql_problem_start(
    problem: *const EgdProblem,
    index: usize,
    buf: *mut f64,
    len: usize,
) -> EgdStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(buf, "buf")?;
        let Kind::Ql { starts, .. } = &(*problem).kind else {
            return Err(fail(
                EgdStatus::Unsupported,
                "not a quasi-likelihood problem",
            ));
        };
        let start = starts
            .get(index)
            .ok_or_else(|| fail(EgdStatus::InvalidArgument, format!("no start {index}")))?;
        if len != start.len() {
            return Err(fail(
                EgdStatus::DimensionMismatch,
                "buffer length differs from dimension",
            ));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(start);
        Ok(())
    })
}

/// Wraps caller-supplied callbacks. `user` is passed through untouched and
/// must outlive the handle.
///
/// # Safety
/// The callbacks must read exactly `n` doubles from `theta` (and write `n` to
/// `grad_out`) and must not unwind. `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn egd_callback_problem_new(
    n: usize,
    objective: EgdObjectiveFn,
    gradient: EgdGradientFn,
    user: *mut c_void,
    out: *mut *mut EgdProblem,
) -> EgdStatus {
    guard(|| {
        non_null(out, "out")?;
        let (Some(objective), Some(gradient)) = (objective, gradient) else {
            return Err(fail(EgdStatus::NullPointer, "callback is null"));
        };
        if n == 0 {
            return Err(fail(
                EgdStatus::InvalidArgument,
                "dimension must be positive",
            ));
        }
        into_handle(
            EgdProblem {
                kind: Kind::Callback(Callback {
                    n,
                    objective,
                    gradient,
                    user,
                }),
            },
            out,
        );
        Ok(())
    })
}

/// The one-dimensional objective on which `method` with step `step` diverges.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn egd_divergence_problem_new(
    method: EgdMethod,
    step: f64,
    out: *mut *mut EgdProblem,
) -> EgdStatus {
    guard(|| {
        non_null(out, "out")?;
        let row = adversarial_row(method_of(method), step).or_status()?;
        let f = divergence_objective(&row).or_status()?;
        into_handle(
            EgdProblem {
                kind: Kind::Divergence(f),
            },
            out,
        );
        Ok(())
    })
}

/// Dimension of a problem, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_problem_dimension(problem: *const EgdProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner().dimension())
}

/// # Safety
/// `problem` must be a live handle, `theta` must hold `n` doubles and `value`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn egd_problem_objective(
    problem: *const EgdProblem,
    theta: *const f64,
    n: usize,
    value: *mut f64,
) -> EgdStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(value, "value")?;
        let p = &*problem;
        *value = p.inner().objective(point(p, theta, n)?);
        Ok(())
    })
}

/// # Safety
/// `problem` must be a live handle; `theta` and `grad_out` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn egd_problem_gradient(
    problem: *const EgdProblem,
    theta: *const f64,
    n: usize,
    grad_out: *mut f64,
) -> EgdStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(grad_out, "grad_out")?;
        let p = &*problem;
        let theta = point(p, theta, n)?;
        p.inner()
            .gradient_into(theta, std::slice::from_raw_parts_mut(grad_out, n));
        Ok(())
    })
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn egd_problem_free(problem: *mut EgdProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs event-driven gradient descent. `params` may be null for defaults.
///
/// # Safety
/// `problem` must be a live handle, `theta0` must hold `n` doubles, `params`
/// must be null or valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn egd_solve_event_driven(
    problem: *const EgdProblem,
    theta0: *const f64,
    n: usize,
    params: *const EgdSolverParams,
    out: *mut *mut EgdReport,
) -> EgdStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(out, "out")?;
        let p = &*problem;
        let theta0 = point(p, theta0, n)?;
        let c = params
            .as_ref()
            .copied()
            .unwrap_or_else(|| egd_solver_params_default());
        let params = SolverParams {
            epsilon: c.epsilon,
            rho: c.rho,
            delta_bar: c.delta_bar,
            delta0: c.delta0,
            radius: c.radius,
            max_inner: c.max_inner,
            outer_budget: c.outer_budget,
            step_budget: (c.step_budget > 0).then_some(c.step_budget),
        };
        let report = solve(p.inner(), theta0, &params).or_status()?;
        into_handle(EgdReport { report }, out);
        Ok(())
    })
}

/// Runs an objective-function-free baseline for at most `budget` updates.
///
/// # Safety
/// As for [`egd_solve_event_driven`].
#[no_mangle]
pub unsafe extern "C" fn egd_solve_baseline(
    problem: *const EgdProblem,
    method: EgdMethod,
    step: f64,
    budget: usize,
    grad_tol: f64,
    theta0: *const f64,
    n: usize,
    out: *mut *mut EgdReport,
) -> EgdStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(out, "out")?;
        let p = &*problem;
        let theta0 = point(p, theta0, n)?;
        let spec = BaselineSpec::new(method_of(method), step, budget, grad_tol).or_status()?;
        let report = solve_baseline(p.inner(), theta0, &spec).or_status()?;
        into_handle(EgdReport { report }, out);
        Ok(())
    })
}

/// Final iterate length, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_dimension(report: *const EgdReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.final_iterate.len())
}

/// # Safety
/// `report` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn egd_report_iterate(
    report: *const EgdReport,
    buf: *mut f64,
    len: usize,
) -> EgdStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(buf, "buf")?;
        let x = &(*report).report.final_iterate;
        if len != x.len() {
            return Err(fail(
                EgdStatus::DimensionMismatch,
                "buffer length differs from dimension",
            ));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(x);
        Ok(())
    })
}

/// Final objective value; NaN when the solver never evaluated it (baselines).
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_objective(report: *const EgdReport) -> f64 {
    report
        .as_ref()
        .and_then(|r| r.report.final_objective)
        .unwrap_or(f64::NAN)
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_grad_norm(report: *const EgdReport) -> f64 {
    report
        .as_ref()
        .map_or(f64::NAN, |r| r.report.final_grad_norm)
}

/// Outer iterations (event-driven) or updates (baselines).
///
/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_iterations(report: *const EgdReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.iterations)
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_gradient_steps(report: *const EgdReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.gradient_steps)
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_objective_evals(report: *const EgdReport) -> u64 {
    report.as_ref().map_or(0, |r| r.report.objective_evals)
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_gradient_evals(report: *const EgdReport) -> u64 {
    report.as_ref().map_or(0, |r| r.report.gradient_evals)
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn egd_report_termination(report: *const EgdReport) -> EgdTermination {
    match report.as_ref().map(|r| r.report.termination) {
        Some(Termination::GradientTolerance) => EgdTermination::GradientTolerance,
        Some(Termination::IterationBudget) => EgdTermination::IterationBudget,
        _ => EgdTermination::NonFinite,
    }
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn egd_report_free(report: *mut EgdReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Value and right derivative of one Frankenstein segment at `theta` in
/// `[0, m]`. Either output pointer may be null.
///
/// # Safety
/// Non-null output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn egd_frankenstein_eval(
    m: f64,
    d: f64,
    delta: f64,
    theta: f64,
    value: *mut f64,
    derivative: *mut f64,
) -> EgdStatus {
    guard(|| {
        let p = FrankensteinParams::new(m, d, delta).or_status()?;
        let v = frankenstein_eval(theta, &p).or_status()?;
        let side = if theta < m { Side::Right } else { Side::Left };
        let dv = frankenstein_derivative(theta, &p, side).or_status()?;
        if let Some(out) = value.as_mut() {
            *out = v;
        }
        if let Some(out) = derivative.as_mut() {
            *out = dv;
        }
        Ok(())
    })
}
