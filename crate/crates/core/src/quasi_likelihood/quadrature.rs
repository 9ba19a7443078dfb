//! Adaptive Simpson quadrature with interval bisection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 50,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                reason: format!("must be positive, got {}", self.abs_tol),
            });
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidParameter {
                name: "max_depth",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Subdivisions always performed before the error estimate is trusted, so an
/// oscillating integrand cannot pass the first test by coincidence.
const MIN_DEPTH: u32 = 3;

/// `∫_a^b f` and the number of integrand evaluations used.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, u64)> {
    if a == b {
        return Ok((0.0, 0));
    }
    let mut nodes = 3;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let v = refine(
        &f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        cfg.abs_tol,
        0,
        cfg.max_depth,
        &mut nodes,
    )?;
    Ok((v, nodes))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
    nodes: &mut u64,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *nodes += 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth >= MIN_DEPTH && diff.abs() <= 15.0 * tol {
        return Ok(left + right + diff / 15.0);
    }
    if !diff.is_finite() {
        return Ok(f64::NAN);
    }
    if depth + 1 >= max_depth {
        return Err(Error::QuadratureDepthExceeded { max_depth });
    }
    let l = refine(
        f,
        a,
        m,
        fa,
        flm,
        fm,
        left,
        0.5 * tol,
        depth + 1,
        max_depth,
        nodes,
    )?;
    let r = refine(
        f,
        m,
        b,
        fm,
        frm,
        fb,
        right,
        0.5 * tol,
        depth + 1,
        max_depth,
        nodes,
    )?;
    Ok(l + r)
}

/// Composite Simpson on `2k` uniform panels.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) =
            adaptive_simpson(|x| x * x * x, 0.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn linear_integrand_closed_form() {
        let cfg = QuadratureConfig::default();
        for (y, u) in [(0.3, 0.1), (1.2, 0.5), (-0.4, 0.9)] {
            let (v, _) = adaptive_simpson(|mu| y - mu, 0.0, u, &cfg).unwrap();
            assert!((v - (y * u - u * u / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn oscillatory_matches_closed_form() {
        let cfg = QuadratureConfig::default();
        let (v, nodes) = adaptive_simpson(|x| (20.0 * x).sin(), 0.0, 1.0, &cfg).unwrap();
        assert!((v - (1.0 - 20f64.cos()) / 20.0).abs() < 1e-9);
        assert!(nodes > 17);
    }

    #[test]
    fn depth_limit_reports_error() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-14,
            max_depth: 4,
        };
        let r = adaptive_simpson(|x: f64| x.sqrt(), 0.0, 1.0, &cfg);
        assert!(matches!(
            r,
            Err(Error::QuadratureDepthExceeded { max_depth: 4 })
        ));
    }

    #[test]
    fn empty_interval() {
        assert_eq!(
            adaptive_simpson(|x| x, 0.3, 0.3, &QuadratureConfig::default()).unwrap(),
            (0.0, 0)
        );
    }
}
