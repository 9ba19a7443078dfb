//! Quasi-likelihood estimation with a logistic link.
//!
//! The objective is `F(θ) = -Σ_i ∫_0^{g(x_i·θ)} (y_i - μ)/V(μ) dμ`. Values need
//! one adaptive quadrature per observation, while the gradient is available in
//! closed form, which is what makes objective evaluations the expensive oracle.

pub mod dataset;
pub mod problem;
pub mod quadrature;

pub use dataset::{
    generate_dataset, raw_design, read_dataset_csv, write_dataset_csv, Dataset, DatasetSpec,
};
pub use problem::QLProblem;
pub use quadrature::{adaptive_simpson, composite_simpson, QuadratureConfig};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Exponent parameter of the variance functions; they use `|·|^{2p}`.
pub const VARIANCE_P: f64 = 2.25;

/// Logistic function, evaluated on the branch that cannot overflow.
pub fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `g'(η) = g(η)(1 - g(η))` without cancellation for large `|η|`.
pub fn logistic_derivative(eta: f64) -> f64 {
    let e = (-eta.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    V1,
    V2,
    V3,
    V4,
    /// `V ≡ 1`, whose integrals are polynomial; only meant for checking quadrature.
    Unit,
}

impl Variance {
    pub const ALL: [Variance; 4] = [Variance::V1, Variance::V2, Variance::V3, Variance::V4];

    pub fn eval(self, mu: f64) -> f64 {
        let q = 2.0 * VARIANCE_P;
        match self {
            Variance::V1 => 1.0 + mu + (2.0 * PI * mu).sin(),
            Variance::V2 => mu.abs().powf(q) + 1.0,
            Variance::V3 => (mu - 1.0).abs().powf(q).exp(),
            Variance::V4 => ((mu - 1.0).abs().powf(q) + 1.0).ln() + 1.0,
            Variance::Unit => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variance::V1 => "V1",
            Variance::V2 => "V2",
            Variance::V3 => "V3",
            Variance::V4 => "V4",
            Variance::Unit => "unit",
        }
    }
}

/// Free-function form of [`Variance::eval`].
pub fn variance_fn(mu: f64, which: Variance) -> f64 {
    which.eval(mu)
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_uppercase().as_str() {
            "V1" => Ok(Variance::V1),
            "V2" => Ok(Variance::V2),
            "V3" => Ok(Variance::V3),
            "V4" => Ok(Variance::V4),
            "UNIT" => Ok(Variance::Unit),
            _ => Err(Error::InvalidParameter {
                name: "variance",
                reason: format!("unknown variance function {s:?}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_values() {
        assert_eq!(logistic(0.0), 0.5);
        for eta in [1.0, 10.0, 100.0] {
            assert!((logistic(-eta) - (1.0 - logistic(eta))).abs() < 1e-16);
        }
        assert!((1.0 - logistic(36.7)).abs() <= 1e-15);
        assert!(logistic(-800.0) == 0.0 && logistic(800.0) == 1.0);
        assert_eq!(logistic_derivative(0.0), 0.25);
        let eta = 3.0;
        assert!((logistic_derivative(eta) - logistic(eta) * (1.0 - logistic(eta))).abs() < 1e-15);
    }

    #[test]
    fn variance_hand_values() {
        assert!((Variance::V1.eval(0.5) - 1.5).abs() < 1e-15);
        assert_eq!(Variance::V2.eval(0.0), 1.0);
        assert_eq!(Variance::V2.eval(1.0), 2.0);
        assert_eq!(Variance::V3.eval(1.0), 1.0);
        assert_eq!(Variance::V4.eval(1.0), 1.0);
    }

    #[test]
    fn variance_positive_on_unit_interval() {
        for v in Variance::ALL {
            for i in 1..1000 {
                let mu = i as f64 / 1000.0;
                assert!(v.eval(mu) > 0.0, "{v} at {mu}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for v in Variance::ALL {
            assert_eq!(v.name().parse::<Variance>().unwrap(), v);
        }
    }
}
