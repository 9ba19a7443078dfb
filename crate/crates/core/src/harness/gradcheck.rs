//! Analytic gradients against central differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::anticonv::{build_divergence_objective, FrankensteinParams, PiecewiseObjective};
use crate::error::Result;
use crate::problem::{finite_difference_gradient, relative_error, DifferentiableProblem};
use crate::quasi_likelihood::{generate_dataset, DatasetSpec, QuadratureConfig, Variance};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-6;
/// Acceptance threshold on the relative error.
pub const GRADCHECK_TOL: f64 = 1e-5;
/// Smallest slope at which a central difference with [`FD_STEP`] can resolve a
/// relative error of [`GRADCHECK_TOL`]. On the plateaus next to the pole of a
/// Frankenstein segment the slope decays like `exp(-c/u)` and drops far below
/// the rounding floor of the difference quotient.
pub const MIN_RESOLVABLE_SLOPE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckPoint {
    pub point: Vec<f64>,
    pub analytic: Vec<f64>,
    pub finite_difference: Vec<f64>,
    pub rel_error: f64,
}

impl GradcheckPoint {
    pub fn passed(&self) -> bool {
        self.rel_error <= GRADCHECK_TOL
    }
}

/// `||fd - g|| / ||g||`; identical vectors (including two zeros) give 0.
fn rel_err(fd: &[f64], g: &[f64]) -> f64 {
    if fd == g {
        0.0
    } else {
        relative_error(fd, g, f64::MIN_POSITIVE)
    }
}

pub fn check_point<P: DifferentiableProblem + ?Sized>(
    problem: &P,
    point: &[f64],
) -> Result<GradcheckPoint> {
    let analytic = problem.gradient(point);
    let fd = finite_difference_gradient(problem, point, FD_STEP)?;
    Ok(GradcheckPoint {
        point: point.to_vec(),
        rel_error: rel_err(&fd, &analytic),
        analytic,
        finite_difference: fd,
    })
}

/// `points` random (θ, dataset) pairs for one variance function. Each pair has
/// its own dataset and θ drawn uniformly from the starting-point box.
pub fn gradcheck_ql(
    variance: Variance,
    n: usize,
    m: usize,
    points: usize,
    seed: u64,
) -> Result<Vec<GradcheckPoint>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..points)
        .map(|_| {
            let spec = DatasetSpec {
                num_starts: 1,
                ..DatasetSpec::new(n, m, variance, rng.random())
            };
            let data = generate_dataset(&spec)?;
            let problem = data.problem(variance, QuadratureConfig::default())?;
            check_point(&problem, &data.starts[0])
        })
        .collect()
}

/// A concatenation of `segments` Frankenstein pieces with seeded widths and
/// endpoint slopes.
pub fn random_concatenation(segments: usize, seed: u64) -> Result<PiecewiseObjective> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut phis = vec![0.0];
    for _ in 0..segments {
        let last = *phis.last().unwrap();
        phis.push(last + rng.random_range(0.5..2.0));
    }
    let ds: Vec<f64> = (0..=segments)
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    build_divergence_objective(&phis, &ds)
}

/// `points` points strictly inside the pieces of a random concatenation,
/// keeping the difference stencil away from piece junctions and skipping points
/// whose slope is below [`MIN_RESOLVABLE_SLOPE`] (flat pieces included).
pub fn gradcheck_frankenstein(
    segments: usize,
    points: usize,
    seed: u64,
) -> Result<Vec<GradcheckPoint>> {
    let f = random_concatenation(segments, seed)?;
    let (phis, ds) = (f.breakpoints(), f.derivative_targets());
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::with_capacity(points);
    let mut attempts = 0usize;
    while out.len() < points {
        attempts += 1;
        if attempts > 1000 * points.max(1) {
            return Err(crate::Error::InvalidParameter {
                name: "points",
                reason: format!("found only {} resolvable interior points", out.len()),
            });
        }
        let j = rng.random_range(0..segments);
        let seg = FrankensteinParams::new(phis[j + 1] - phis[j], ds[j], ds[j + 1])?;
        let t = rng.random_range(0.0..seg.m());
        let margin = 1e-3 * seg.m();
        if t < margin
            || t > seg.m() - margin
            || seg.junctions().iter().any(|c| (t - c).abs() < margin)
        {
            continue;
        }
        let x = phis[j] + t;
        if f.derivative(x).abs() < MIN_RESOLVABLE_SLOPE {
            continue;
        }
        out.push(check_point(&f, &[x])?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Quadratic;

    #[test]
    fn quadratic_passes() {
        let q = Quadratic::isotropic(3);
        let r = check_point(&q, &[1.0, -2.0, 0.5]).unwrap();
        assert!(r.passed(), "{}", r.rel_error);
    }

    #[test]
    fn zero_gradient_counts_as_exact() {
        assert_eq!(rel_err(&[0.0], &[0.0]), 0.0);
        assert!(rel_err(&[1e-12], &[0.0]) > 1.0);
    }
}
