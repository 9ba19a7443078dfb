use std::ffi::{c_void, CStr};
use std::ptr;

use eventgd_ffi::*;

unsafe extern "C" fn half_square(theta: *const f64, n: usize, _user: *mut c_void) -> f64 {
    let t = std::slice::from_raw_parts(theta, n);
    0.5 * t.iter().map(|x| x * x).sum::<f64>()
}

unsafe extern "C" fn identity_grad(theta: *const f64, n: usize, out: *mut f64, user: *mut c_void) {
    *(user as *mut usize) += 1;
    ptr::copy_nonoverlapping(theta, out, n);
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(egd_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn callback_problem_solves_and_counts() {
    let mut calls = 0usize;
    let mut p = ptr::null_mut();
    unsafe {
        let st = egd_callback_problem_new(
            3,
            Some(half_square),
            Some(identity_grad),
            &mut calls as *mut usize as *mut c_void,
            &mut p,
        );
        assert_eq!(st, EgdStatus::Ok);
        assert_eq!(egd_problem_dimension(p), 3);

        let theta0 = [1.0, -2.0, 0.5];
        let mut r = ptr::null_mut();
        assert_eq!(
            egd_solve_event_driven(p, theta0.as_ptr(), 3, ptr::null(), &mut r),
            EgdStatus::Ok
        );
        assert_eq!(egd_report_termination(r), EgdTermination::GradientTolerance);
        assert!(egd_report_grad_norm(r) <= 1e-3);
        assert!(egd_report_objective(r) < 2.625);
        assert_eq!(
            egd_report_objective_evals(r),
            egd_report_iterations(r) as u64 + 1
        );
        assert_eq!(egd_report_gradient_evals(r) as usize, calls);
        let mut x = [0.0; 3];
        assert_eq!(egd_report_iterate(r, x.as_mut_ptr(), 3), EgdStatus::Ok);
        assert!(x.iter().all(|v| v.abs() < 1e-3));
        egd_report_free(r);

        let mut r = ptr::null_mut();
        let st = egd_solve_baseline(
            p,
            EgdMethod::Fixed,
            1.0,
            10,
            1e-12,
            theta0.as_ptr(),
            3,
            &mut r,
        );
        assert_eq!(st, EgdStatus::Ok);
        assert_eq!(egd_report_iterations(r), 1);
        assert!(egd_report_objective(r).is_nan());
        egd_report_free(r);
        egd_problem_free(p);
    }
}

#[test]
fn ql_problem_round_trip() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            egd_ql_problem_new(EgdVariance::V2, 4, 25, 7, 2, &mut p),
            EgdStatus::Ok
        );
        let mut start = [0.0; 4];
        assert_eq!(
            egd_ql_problem_start(p, 1, start.as_mut_ptr(), 4),
            EgdStatus::Ok
        );
        assert_eq!(
            egd_ql_problem_start(p, 2, start.as_mut_ptr(), 4),
            EgdStatus::InvalidArgument
        );

        let mut f = 0.0;
        assert_eq!(
            egd_problem_objective(p, start.as_ptr(), 4, &mut f),
            EgdStatus::Ok
        );
        assert!(f.is_finite());
        let mut g = [0.0; 4];
        assert_eq!(
            egd_problem_gradient(p, start.as_ptr(), 4, g.as_mut_ptr()),
            EgdStatus::Ok
        );

        let params = EgdSolverParams {
            step_budget: 200,
            ..egd_solver_params_default()
        };
        let mut r = ptr::null_mut();
        assert_eq!(
            egd_solve_event_driven(p, start.as_ptr(), 4, &params, &mut r),
            EgdStatus::Ok
        );
        assert!(egd_report_objective(r) <= f);
        assert!(egd_report_gradient_steps(r) <= 200);
        egd_report_free(r);
        egd_problem_free(p);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            egd_ql_problem_new(EgdVariance::V1, 1, 10, 0, 1, &mut p),
            EgdStatus::InvalidArgument
        );
        assert!(p.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            egd_divergence_problem_new(EgdMethod::Nesterov, 1.0, &mut p),
            EgdStatus::Unsupported
        );
        assert!(last_error().contains("nesterov"), "{}", last_error());

        assert_eq!(
            egd_callback_problem_new(2, None, Some(identity_grad), ptr::null_mut(), &mut p),
            EgdStatus::NullPointer
        );

        assert_eq!(
            egd_divergence_problem_new(EgdMethod::Fixed, 1.0, &mut p),
            EgdStatus::Ok
        );
        let theta = [0.0, 0.0];
        let mut v = 0.0;
        assert_eq!(
            egd_problem_objective(p, theta.as_ptr(), 2, &mut v),
            EgdStatus::DimensionMismatch
        );
        assert_eq!(
            egd_problem_objective(p, ptr::null(), 1, &mut v),
            EgdStatus::NullPointer
        );
        assert_eq!(
            egd_solve_baseline(
                p,
                EgdMethod::Fixed,
                -1.0,
                5,
                0.0,
                theta.as_ptr(),
                1,
                &mut ptr::null_mut()
            ),
            EgdStatus::InvalidArgument
        );
        egd_problem_free(p);
        egd_problem_free(ptr::null_mut());
        egd_report_free(ptr::null_mut());
    }
}

#[test]
fn divergence_problem_defeats_fixed_step() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            egd_divergence_problem_new(EgdMethod::Fixed, 1.0, &mut p),
            EgdStatus::Ok
        );
        let mut r = ptr::null_mut();
        assert_eq!(
            egd_solve_baseline(p, EgdMethod::Fixed, 1.0, 50, 0.0, [0.0].as_ptr(), 1, &mut r),
            EgdStatus::Ok
        );
        let mut x = 0.0;
        egd_report_iterate(r, &mut x, 1);
        assert_eq!(x, 50.0);
        let mut f = 0.0;
        egd_problem_objective(p, &x, 1, &mut f);
        assert!(f >= 25.0);
        egd_report_free(r);
        egd_problem_free(p);
    }
}

#[test]
fn frankenstein_endpoints() {
    let (mut v, mut d) = (f64::NAN, f64::NAN);
    unsafe {
        assert_eq!(
            egd_frankenstein_eval(1.0, 2.0, 1.0, 0.0, &mut v, &mut d),
            EgdStatus::Ok
        );
        assert_eq!((v, d), (0.0, -2.0));
        assert_eq!(
            egd_frankenstein_eval(1.0, 2.0, -3.0, 1.0, ptr::null_mut(), &mut d),
            EgdStatus::Ok
        );
        assert_eq!(d, 3.0);
        assert_eq!(
            egd_frankenstein_eval(1.0, 2.0, 1.0, 1.5, &mut v, &mut d),
            EgdStatus::InvalidArgument
        );
    }
}
