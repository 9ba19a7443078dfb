use std::sync::atomic::{AtomicU64, Ordering};

use super::quadrature::{adaptive_simpson, QuadratureConfig};
use super::{logistic, logistic_derivative, Variance};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::problem::DifferentiableProblem;

/// Quasi-likelihood objective over a design matrix `X` (m × n, row-major)
/// whose first column is the intercept.
#[derive(Debug)]
pub struct QLProblem {
    x: Vec<f64>,
    y: Vec<f64>,
    m: usize,
    n: usize,
    variance: Variance,
    quadrature: QuadratureConfig,
    nodes: AtomicU64,
}

impl Clone for QLProblem {
    fn clone(&self) -> Self {
        Self {
            x: self.x.clone(),
            y: self.y.clone(),
            m: self.m,
            n: self.n,
            variance: self.variance,
            quadrature: self.quadrature,
            nodes: AtomicU64::new(0),
        }
    }
}

impl QLProblem {
    pub fn new(
        x: Vec<f64>,
        y: Vec<f64>,
        n: usize,
        variance: Variance,
        quadrature: QuadratureConfig,
    ) -> Result<Self> {
        quadrature.validate()?;
        if n == 0 || !x.len().is_multiple_of(n) {
            return Err(Error::InvalidParameter {
                name: "x",
                reason: format!("length {} is not a multiple of n = {n}", x.len()),
            });
        }
        let m = x.len() / n;
        if y.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: y.len(),
            });
        }
        if let Some(i) = (0..m).find(|&i| x[i * n] != 1.0) {
            return Err(Error::InvalidParameter {
                name: "x",
                reason: format!("row {i} has intercept entry {} instead of 1", x[i * n]),
            });
        }
        if !x.iter().chain(&y).all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState);
        }
        if let Some(i) = (1..1000).find(|&i| !(variance.eval(i as f64 / 1000.0) > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "variance",
                reason: format!("{variance} is not positive at mu = {}", i as f64 / 1000.0),
            });
        }
        Ok(Self {
            x,
            y,
            m,
            n,
            variance,
            quadrature,
            nodes: AtomicU64::new(0),
        })
    }

    pub fn observations(&self) -> usize {
        self.m
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn design(&self) -> &[f64] {
        &self.x
    }

    pub fn response(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n..(i + 1) * self.n]
    }

    /// Integrand evaluations spent in quadrature so far.
    pub fn quadrature_node_count(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    /// `∫_0^u (y - μ)/V(μ) dμ` for one observation value `y`.
    pub fn integral(&self, y: f64, upper: f64) -> Result<f64> {
        let v = self.variance;
        let (val, nodes) =
            adaptive_simpson(|mu| (y - mu) / v.eval(mu), 0.0, upper, &self.quadrature)?;
        self.nodes.fetch_add(nodes, Ordering::Relaxed);
        Ok(val)
    }

    /// The objective, reporting quadrature failure instead of returning NaN.
    pub fn objective_checked(&self, theta: &[f64]) -> Result<f64> {
        self.check_len(theta)?;
        let mut total = 0.0;
        for i in 0..self.m {
            let upper = logistic(dot(self.row(i), theta));
            total += self.integral(self.y[i], upper)?;
        }
        Ok(-total)
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: theta.len(),
            });
        }
        Ok(())
    }
}

impl DifferentiableProblem for QLProblem {
    fn dimension(&self) -> usize {
        self.n
    }

    fn objective(&self, theta: &[f64]) -> f64 {
        self.objective_checked(theta).unwrap_or(f64::NAN)
    }

    fn gradient_into(&self, theta: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.m {
            let row = self.row(i);
            let eta = dot(row, theta);
            let mu = logistic(eta);
            let w = -(self.y[i] - mu) / self.variance.eval(mu) * logistic_derivative(eta);
            for (o, xij) in out.iter_mut().zip(row) {
                *o += w * xij;
            }
        }
    }
}
