use std::f64::consts::PI;

use eventgd::anticonv::{frankenstein_derivative, frankenstein_eval, FrankensteinParams, Side};
use eventgd::event_driven::{solve, SolverParams};
use eventgd::problem::{Counted, Quadratic};
use eventgd::quasi_likelihood::dataset::arcsine_error;
use eventgd::quasi_likelihood::{
    adaptive_simpson, composite_simpson, generate_dataset, DatasetSpec, QuadratureConfig, Variance,
};
use eventgd::DifferentiableProblem;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[test]
fn arcsine_errors_are_standardized() {
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| arcsine_error(&mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 0.01, "mean {mean}");
    assert!((var - 1.0).abs() < 0.02, "variance {var}");

    // Kolmogorov-Smirnov distance to the standardized arcsine law.
    let cdf = |x: f64| {
        let v = (0.5 + x * 0.125f64.sqrt()).clamp(0.0, 1.0);
        2.0 / PI * v.sqrt().asin()
    };
    xs.sort_by(f64::total_cmp);
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n as f64)
                .abs()
                .max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS distance {ks}");
    let bound = 2f64.sqrt();
    assert!(xs[0] >= -bound && xs[n - 1] <= bound);
}

#[test]
fn event_driven_matches_scalar_hand_trace() {
    // On θ²/2 from θ = 1 each outer iteration takes one step of size
    // 1/(2θ+1) and leaves the gradient band through its lower edge, so the
    // accepted iterates follow θ ← 2θ²/(2θ+1): 1, 2/3, 8/21, 128/777.
    let q = Counted::new(Quadratic::isotropic(1));
    let params = SolverParams {
        outer_budget: 3,
        ..SolverParams::new(1e-3, 1e-4, 1.0, 1.0).unwrap()
    };
    let report = solve(&q, &[1.0], &params).unwrap();
    let expected = [1.0, 2.0 / 3.0, 8.0 / 21.0, 128.0 / 777.0];
    assert_eq!(report.trace.len(), 4);
    for (t, e) in report.trace.iter().zip(expected) {
        let f = t.objective.unwrap();
        assert!((f - 0.5 * e * e).abs() <= 1e-12, "{f} vs {}", 0.5 * e * e);
    }
    assert!((report.final_iterate[0] - 128.0 / 777.0).abs() < 1e-12);
    assert_eq!(report.gradient_steps, 3);
    assert_eq!(q.objective_eval_count(), 4);
}

#[test]
fn frankenstein_derivative_matches_differences() {
    let p = FrankensteinParams::new(1.5, 2.0, -0.75).unwrap();
    assert_eq!(frankenstein_derivative(0.0, &p, Side::Right).unwrap(), -2.0);
    assert_eq!(frankenstein_derivative(1.5, &p, Side::Left).unwrap(), 0.75);
    assert!(
        frankenstein_derivative(0.75, &p, Side::Right)
            .unwrap()
            .abs()
            < 1e-300
    );

    let h = 1e-6;
    for i in 0..50 {
        let t = (i as f64 + 0.5) / 50.0 * p.m();
        let fd = (frankenstein_eval(t + h, &p).unwrap() - frankenstein_eval(t - h, &p).unwrap())
            / (2.0 * h);
        let exact = frankenstein_derivative(t, &p, Side::Right).unwrap();
        assert!(
            (fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
            "t = {t}: {fd} vs {exact}"
        );
    }
}

#[test]
fn ql_objective_matches_dense_simpson() {
    let spec = DatasetSpec::new(10, 20, Variance::V3, 5);
    let data = generate_dataset(&spec).unwrap();
    let q = data
        .problem(Variance::V3, QuadratureConfig::default())
        .unwrap();
    let theta = &data.starts[0];

    let mut dense = 0.0;
    for i in 0..q.observations() {
        let row = q.row(i);
        let eta: f64 = row.iter().zip(theta).map(|(x, t)| x * t).sum();
        let y = q.response()[i];
        let upper = eventgd::quasi_likelihood::logistic(eta);
        let integrand = |mu: f64| (y - mu) / Variance::V3.eval(mu);
        dense -= composite_simpson(integrand, 0.0, upper, 200_000);
    }
    let f = q.objective(theta);
    assert!(
        (f - dense).abs() <= 1e-9 * dense.abs().max(1.0),
        "{f} vs {dense}"
    );

    let (v, _) =
        adaptive_simpson(|x: f64| x.exp(), 0.0, 1.0, &QuadratureConfig::default()).unwrap();
    assert!((v - (1f64.exp() - 1.0)).abs() < 1e-10);
}
