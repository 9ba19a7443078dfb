//! Concatenation of Frankenstein segments into a smooth function on `R`.
//!
//! Segment `j` covers `[φ_j, φ_{j+1}]` and is
//! `f(θ - φ_j; φ_{j+1} - φ_j, d_j, d_{j+1}) + c_j`, where the offsets `c_j`
//! accumulate segment end values so the function is continuous. The result has
//! `F'(φ_j) = -d_j` and `F(φ_j) ≥ (φ_j - φ_0)/2`.
//!
//! Left of the first breakpoint the function is linear with slope `-d_0`.
//! Objectives built from a finite list also continue linearly to the right.
//! Breakpoints can instead be produced lazily from a generator; segments are
//! then materialized on first use, up to [`MAX_SEGMENTS`]. Once the generator
//! is exhausted or the cap is reached, the last segment is repeated
//! periodically with both endpoint slopes equal to the final `d`, which keeps
//! the function smooth, bounded below and growing.

use std::sync::Mutex;

use super::frankenstein::FrankensteinParams;
use crate::error::{Error, Result};
use crate::linalg::CompensatedSum;
use crate::problem::DifferentiableProblem;

/// Produces `(φ_j, d_j)` for `j = 0, 1, 2, ...`; `None` ends the sequence.
pub type BreakpointSource = Box<dyn FnMut(usize) -> Option<(f64, f64)> + Send>;

/// Most breakpoints a lazy source is asked for.
pub const MAX_SEGMENTS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tail {
    Linear,
    Periodic,
}

struct Segments {
    phis: Vec<f64>,
    ds: Vec<f64>,
    /// `c_j` for each breakpoint.
    offsets: Vec<f64>,
    sum: CompensatedSum,
    source: Option<BreakpointSource>,
    tail: Tail,
}

impl Segments {
    fn push(&mut self, phi: f64, d: f64) -> Result<()> {
        let j = self.phis.len();
        if j > 0 {
            let prev = self.phis[j - 1];
            if !(phi > prev) || !phi.is_finite() {
                return Err(Error::NonIncreasingBreakpoints { index: j });
            }
            let params = FrankensteinParams::new(phi - prev, self.ds[j - 1], d)?;
            let end = params.eval_piece(params.piece(params.m()), params.m());
            self.sum.add(end);
        } else if !phi.is_finite() {
            return Err(Error::NonIncreasingBreakpoints { index: 0 });
        }
        if !d.is_finite() {
            return Err(Error::InvalidParameter {
                name: "ds",
                reason: format!("d_{j} is not finite"),
            });
        }
        self.phis.push(phi);
        self.ds.push(d);
        self.offsets.push(self.sum.value());
        Ok(())
    }

    /// Extends until a breakpoint strictly beyond `theta` exists, or the source ends.
    fn materialize_past(&mut self, theta: f64) {
        while self.phis.last().is_none_or(|&p| p <= theta) && self.pull() {}
    }

    /// Takes one breakpoint from the source; false once it is exhausted or invalid.
    fn pull(&mut self) -> bool {
        let j = self.phis.len();
        if j >= MAX_SEGMENTS {
            self.source = None;
        }
        let Some(src) = self.source.as_mut() else {
            return false;
        };
        match src(j) {
            Some((phi, d)) if self.push(phi, d).is_ok() => true,
            _ => {
                self.source = None;
                false
            }
        }
    }

    fn segment(&self, j: usize) -> FrankensteinParams {
        FrankensteinParams::new(self.phis[j + 1] - self.phis[j], self.ds[j], self.ds[j + 1])
            .expect("validated on push")
    }

    /// Evaluates value and derivative at `theta` against the materialized prefix.
    fn eval(&self, theta: f64) -> (f64, f64) {
        let n = self.phis.len();
        let (phi0, d0) = (self.phis[0], self.ds[0]);
        if theta <= phi0 {
            return (-d0 * (theta - phi0), -d0);
        }
        let last = self.phis[n - 1];
        if theta >= last {
            let (dl, cl) = (self.ds[n - 1], self.offsets[n - 1]);
            if self.tail == Tail::Linear || n == 1 {
                return (cl - dl * (theta - last), -dl);
            }
            let seg = FrankensteinParams::new(last - self.phis[n - 2], dl, dl)
                .expect("validated on push");
            let m = seg.m();
            let rise = seg.eval_piece(seg.piece(m), m);
            let periods = ((theta - last) / m).floor();
            let local = (theta - last - periods * m).clamp(0.0, m);
            let piece = seg.piece(local);
            return (
                cl + periods * rise + seg.eval_piece(piece, local),
                seg.derivative_piece(piece, local),
            );
        }
        // phis[j] <= theta < phis[j + 1]
        let j = self.phis.partition_point(|&p| p <= theta) - 1;
        let seg = self.segment(j);
        let local = (theta - self.phis[j]).clamp(0.0, seg.m());
        let piece = seg.piece(local);
        (
            seg.eval_piece(piece, local) + self.offsets[j],
            seg.derivative_piece(piece, local),
        )
    }
}

/// A one-dimensional objective assembled from Frankenstein segments.
pub struct PiecewiseObjective {
    inner: Mutex<Segments>,
}

impl std::fmt::Debug for PiecewiseObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = self.inner.lock().unwrap();
        f.debug_struct("PiecewiseObjective")
            .field("materialized", &s.phis.len())
            .field("lazy", &s.source.is_some())
            .finish()
    }
}

impl PiecewiseObjective {
    /// Builds from a lazy breakpoint generator. The first breakpoint is
    /// materialized eagerly.
    pub fn from_source(mut source: BreakpointSource) -> Result<Self> {
        let (phi0, d0) = source(0).ok_or(Error::InvalidParameter {
            name: "source",
            reason: "breakpoint source is empty".into(),
        })?;
        let mut segs = Segments {
            phis: Vec::new(),
            ds: Vec::new(),
            offsets: Vec::new(),
            sum: CompensatedSum::new(),
            source: None,
            tail: Tail::Periodic,
        };
        segs.push(phi0, d0)?;
        segs.source = Some(source);
        Ok(Self {
            inner: Mutex::new(segs),
        })
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.value_and_derivative(theta).0
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        self.value_and_derivative(theta).1
    }

    pub fn value_and_derivative(&self, theta: f64) -> (f64, f64) {
        if theta.is_nan() {
            return (f64::NAN, f64::NAN);
        }
        let mut s = self.inner.lock().expect("segment lock poisoned");
        s.materialize_past(theta);
        s.eval(theta)
    }

    /// Value at `theta` computed from segment `j` (which must be materialized),
    /// regardless of which segment owns `theta`.
    pub fn value_on_segment(&self, j: usize, theta: f64) -> Option<f64> {
        let s = self.inner.lock().unwrap();
        if j + 1 >= s.phis.len() {
            return None;
        }
        let seg = s.segment(j);
        let local = theta - s.phis[j];
        if !(0.0..=seg.m()).contains(&local) {
            return None;
        }
        Some(seg.eval_piece(seg.piece(local), local) + s.offsets[j])
    }

    /// Forces materialization of the first `count` breakpoints (if available).
    pub fn materialize(&self, count: usize) -> usize {
        let mut s = self.inner.lock().unwrap();
        while s.phis.len() < count && s.pull() {}
        s.phis.len()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.inner.lock().unwrap().phis.clone()
    }

    pub fn derivative_targets(&self) -> Vec<f64> {
        self.inner.lock().unwrap().ds.clone()
    }

    pub fn offsets(&self) -> Vec<f64> {
        self.inner.lock().unwrap().offsets.clone()
    }
}

impl DifferentiableProblem for PiecewiseObjective {
    fn dimension(&self) -> usize {
        1
    }
    fn objective(&self, theta: &[f64]) -> f64 {
        self.value(theta[0])
    }
    fn gradient_into(&self, theta: &[f64], out: &mut [f64]) {
        out[0] = self.derivative(theta[0]);
    }
}

/// Concatenates segments over finite breakpoint and slope sequences.
pub fn build_divergence_objective(phis: &[f64], ds: &[f64]) -> Result<PiecewiseObjective> {
    if phis.len() != ds.len() {
        return Err(Error::InvalidParameter {
            name: "ds",
            reason: format!("expected {} slopes, got {}", phis.len(), ds.len()),
        });
    }
    if phis.is_empty() {
        return Err(Error::InvalidParameter {
            name: "phis",
            reason: "at least one breakpoint is required".into(),
        });
    }
    let mut segs = Segments {
        phis: Vec::with_capacity(phis.len()),
        ds: Vec::with_capacity(ds.len()),
        offsets: Vec::with_capacity(phis.len()),
        sum: CompensatedSum::new(),
        source: None,
        tail: Tail::Linear,
    };
    for (&phi, &d) in phis.iter().zip(ds) {
        segs.push(phi, d)?;
    }
    Ok(PiecewiseObjective {
        inner: Mutex::new(segs),
    })
}
