use eventgd::anticonv::{build_divergence_objective, frankenstein_eval, FrankensteinParams};
use eventgd::baselines::{Baseline, BaselineSpec, Method};
use eventgd::event_driven::{
    solve_observed, AcceptDecision, OuterEvent, SolveObserver, SolverParams, MAX_STEP, MIN_STEP,
};
use eventgd::problem::{FnProblem, Quadratic};
use eventgd::DifferentiableProblem;
use proptest::prelude::*;

#[derive(Default)]
struct Recorder {
    alphas: Vec<f64>,
    events: Vec<Event>,
}

struct Event {
    f_before: f64,
    f_after: f64,
    threshold: f64,
    theta_moved: bool,
    delta_before: f64,
    delta_after: f64,
    tau_ratio: f64,
    decision: AcceptDecision,
}

impl SolveObserver for Recorder {
    fn on_step_size(&mut self, alpha: f64) {
        self.alphas.push(alpha);
    }
    fn on_outer(&mut self, e: &OuterEvent<'_>) {
        let g = e.before.grad_norm();
        self.events.push(Event {
            f_before: e.before.objective_at_theta,
            f_after: e.after.objective_at_theta,
            threshold: e.before.objective_at_theta - 1e-4 * e.before.delta * e.inner.alpha0 * g * g,
            theta_moved: e.before.theta != e.after.theta,
            delta_before: e.before.delta,
            delta_after: e.after.delta,
            tau_ratio: e.after.tau_up / e.after.tau_low,
            decision: e.decision,
        });
    }
}

/// Separable nonconvex test function `sum c_i t_i^2 / 2 + s_i cos(t_i)`.
fn wavy(c: Vec<f64>, s: Vec<f64>) -> impl DifferentiableProblem {
    let (c2, s2) = (c.clone(), s.clone());
    FnProblem::new(
        c.len(),
        move |t: &[f64]| {
            t.iter()
                .zip(c.iter().zip(&s))
                .map(|(t, (c, s))| 0.5 * c * t * t + s * t.cos())
                .sum()
        },
        move |t: &[f64], out: &mut [f64]| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = c2[i] * t[i] - s2[i] * t[i].sin();
            }
        },
    )
}

fn problem_and_start() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..5).prop_flat_map(|n| {
        (
            prop::collection::vec(1e-2..1e2f64, n),
            prop::collection::vec(0.0..5.0f64, n),
            prop::collection::vec(-20.0..20.0f64, n),
        )
    })
}

fn params(delta0: f64) -> SolverParams {
    SolverParams {
        outer_budget: 300,
        ..SolverParams::new(1e-6, 1e-4, 1.0, delta0).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outer_iterations_obey_the_acceptance_rules(
        (c, s, theta0) in problem_and_start(),
        delta0 in 0.01..1.0f64,
    ) {
        let p = wavy(c, s);
        let mut rec = Recorder::default();
        let report = solve_observed(&p, &theta0, &params(delta0), &mut rec).unwrap();

        prop_assert_eq!(report.objective_evals as usize, report.iterations + 1);
        prop_assert!(rec.alphas.iter().all(|a| (MIN_STEP..=MAX_STEP).contains(a)));
        let f0 = report.initial_objective().unwrap();
        prop_assert!(report.final_objective.unwrap() <= f0);

        for e in &rec.events {
            prop_assert!(e.delta_after <= 1.0);
            prop_assert!((e.tau_ratio - 20f64.sqrt()).abs() <= 1e-12 * 20f64.sqrt());
            match e.decision {
                AcceptDecision::Rejected => {
                    prop_assert!(!e.theta_moved);
                    prop_assert_eq!(e.f_after, e.f_before);
                    prop_assert_eq!(e.delta_after, 0.5 * e.delta_before);
                }
                AcceptDecision::AcceptedLowGradient => {
                    prop_assert!(e.f_after < e.threshold);
                    prop_assert_eq!(e.delta_after, e.delta_before);
                }
                _ => {
                    prop_assert!(e.f_after < e.threshold);
                    prop_assert_eq!(e.delta_after, (1.5 * e.delta_before).min(1.0));
                }
            }
        }
    }

    #[test]
    fn quadratic_runs_reach_tolerance(curv in prop::collection::vec(0.1..10.0f64, 1..6), scale in 0.1..10.0f64) {
        let n = curv.len();
        let q = Quadratic { curvature: curv };
        let theta0 = vec![scale; n];
        let mut rec = Recorder::default();
        let report = solve_observed(&q, &theta0, &params(1.0), &mut rec).unwrap();
        prop_assert!(report.final_grad_norm <= 1e-6 || report.iterations == 300);
        prop_assert!(rec.alphas.iter().all(|a| (MIN_STEP..=MAX_STEP).contains(a)));
    }

    #[test]
    fn wngrad_weight_never_decreases(grads in prop::collection::vec(-1e3..1e3f64, 1..60), step in 1e-4..10.0f64) {
        let spec = BaselineSpec::new(Method::WNGrad, step, usize::MAX, 0.0).unwrap();
        let mut b = Baseline::new(spec, &[0.0]);
        let mut mu = b.state().mu;
        for g in grads {
            b.advance(&[g]);
            prop_assert!(b.state().mu >= mu);
            mu = b.state().mu;
        }
    }

    #[test]
    fn frankenstein_lemma_bounds(m in 0.05..5.0f64, d in -5.0..5.0f64, delta in -5.0..5.0f64) {
        let p = FrankensteinParams::new(m, d, delta).unwrap();
        let ulps = 64.0 * f64::EPSILON * m * (1.0 + d.abs() + delta.abs());
        prop_assert!(frankenstein_eval(m, &p).unwrap() >= m / 2.0 - ulps);
        for i in 0..=200 {
            let t = (m * i as f64 / 200.0).min(m);
            prop_assert!(frankenstein_eval(t, &p).unwrap() >= -m / 8.0 - ulps);
        }
        prop_assert!(p.junction_gaps().iter().all(|g| *g <= 1e-10 * (1.0 + m)));
    }

    #[test]
    fn concatenation_is_continuous_and_bounded(
        widths in prop::collection::vec(0.05..1.0f64, 1..20),
        ds in prop::collection::vec(-3.0..3.0f64, 21),
    ) {
        let mut phis = vec![0.0];
        for w in &widths {
            phis.push(phis.last().unwrap() + w);
        }
        let ds = &ds[..phis.len()];
        let f = build_divergence_objective(&phis, ds).unwrap();
        for j in 1..phis.len() - 1 {
            let left = f.value_on_segment(j - 1, phis[j]).unwrap();
            let right = f.value_on_segment(j, phis[j]).unwrap();
            prop_assert!((left - right).abs() <= 1e-12 * (1.0 + left.abs()));
            prop_assert!((f.derivative(phis[j]) + ds[j]).abs() <= 1e-12 * (1.0 + ds[j].abs()));
        }
        // Every width is at most 1, so the lower bound -1/8 applies throughout.
        let end = *phis.last().unwrap();
        for i in 0..=2000 {
            let t = end * i as f64 / 2000.0;
            prop_assert!(f.value(t) >= -0.125 - 1e-12, "F({}) = {}", t, f.value(t));
        }
    }
}
