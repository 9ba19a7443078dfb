//! An eleven-piece building block `f(θ; m, d, δ)` on `[0, m]`.
//!
//! `f` is C¹ with a locally Lipschitz derivative, starts at `f(0) = 0` with slope
//! `-d`, ends with slope `-δ`, is flat to all higher orders at both endpoints,
//! satisfies `f(m) ≥ m/2` and stays above `-m/8`.

use crate::error::{Error, Result};

/// Exponents below this are treated as an exact zero contribution.
const EXP_UNDERFLOW: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrankensteinParams {
    m: f64,
    d: f64,
    delta: f64,
    a: f64,
    b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Index of the piece owning a point, 0-based in printed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Piece(pub(crate) u8);

impl FrankensteinParams {
    pub fn new(m: f64, d: f64, delta: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("segment width must be positive and finite, got {m}"),
            });
        }
        if !d.is_finite() || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "d/delta",
                reason: "endpoint slopes must be finite".into(),
            });
        }
        Ok(Self {
            m,
            d,
            delta,
            a: d.abs().max(1.0),
            b: delta.abs().max(1.0),
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }

    /// The ten interior junctions between consecutive pieces, in order.
    pub fn junctions(&self) -> [f64; 10] {
        let (m, a, b) = (self.m, self.a, self.b);
        [
            m / (16.0 * a),
            m / (8.0 * a),
            m / 8.0,
            3.0 * m / 16.0,
            m / 2.0,
            m / 2.0,
            13.0 * m / 16.0,
            14.0 * m / 16.0,
            (16.0 * b - 2.0) * m / (16.0 * b),
            (16.0 * b - 1.0) * m / (16.0 * b),
        ]
    }

    /// `|left piece - right piece|` at each of the ten junctions, with the
    /// exponential pieces taken at their limit on the pole.
    pub fn junction_gaps(&self) -> [f64; 10] {
        let js = self.junctions();
        std::array::from_fn(|i| {
            let (l, r) = (Piece(i as u8), Piece(i as u8 + 1));
            (self.eval_piece(l, js[i]) - self.eval_piece(r, js[i])).abs()
        })
    }

    /// Same as [`Self::junction_gaps`] for the derivative.
    pub fn junction_slope_gaps(&self) -> [f64; 10] {
        let js = self.junctions();
        std::array::from_fn(|i| {
            let (l, r) = (Piece(i as u8), Piece(i as u8 + 1));
            (self.derivative_piece(l, js[i]) - self.derivative_piece(r, js[i])).abs()
        })
    }

    /// `11m/32 - 3md/(32a)`, the plateau level around `m/2`.
    fn mid_level(&self) -> f64 {
        11.0 * self.m / 32.0 - 3.0 * self.m * self.d / (32.0 * self.a)
    }

    /// `22m/32 - 3md/(32a)`, the upper plateau level.
    fn top_level(&self) -> f64 {
        22.0 * self.m / 32.0 - 3.0 * self.m * self.d / (32.0 * self.a)
    }

    pub(crate) fn piece(&self, t: f64) -> Piece {
        let (m, a, b) = (self.m, self.a, self.b);
        let p = if t < m / (16.0 * a) {
            0
        } else if t < m / (8.0 * a) {
            1
        } else if t <= m / 8.0 {
            2
        } else if t < 3.0 * m / 16.0 {
            3
        } else if t < m / 2.0 {
            4
        } else if t == m / 2.0 {
            5
        } else if t < 13.0 * m / 16.0 {
            6
        } else if t < 14.0 * m / 16.0 {
            7
        } else if t <= (16.0 * b - 2.0) * m / (16.0 * b) {
            8
        } else if t < (16.0 * b - 1.0) * m / (16.0 * b) {
            9
        } else {
            10
        };
        Piece(p)
    }

    pub(crate) fn eval_piece(&self, piece: Piece, t: f64) -> f64 {
        let (m, d, delta, a, b) = (self.m, self.d, self.delta, self.a, self.b);
        match piece.0 {
            0 => -d * t,
            1 => {
                let s = t - m / (8.0 * a);
                8.0 * d * a / m * s * s - 3.0 * m * d / (32.0 * a)
            }
            2 => -3.0 * m * d / (32.0 * a),
            3 => {
                let s = t - m / 8.0;
                8.0 / m * s * s - 3.0 * m * d / (32.0 * a)
            }
            4 => {
                let u = t / m - 0.5;
                let e = 5.0 / 16.0 / u + 1.0;
                if u >= 0.0 || e < EXP_UNDERFLOW {
                    self.mid_level()
                } else {
                    -5.0 * m / 16.0 * e.exp() + self.mid_level()
                }
            }
            5 => self.mid_level(),
            6 => {
                let u = t / m - 0.5;
                let e = -5.0 / 16.0 / u + 1.0;
                if u <= 0.0 || e < EXP_UNDERFLOW {
                    self.mid_level()
                } else {
                    5.0 * m / 16.0 * e.exp() + self.mid_level()
                }
            }
            7 => {
                let s = t - 7.0 * m / 8.0;
                -8.0 / m * s * s + self.top_level()
            }
            8 => self.top_level(),
            9 => {
                let s = t - (16.0 * b - 2.0) * m / (16.0 * b);
                -8.0 * delta * b / m * s * s + self.top_level()
            }
            _ => -delta * t + (32.0 * b - 3.0) * delta * m / (32.0 * b) + self.top_level(),
        }
    }

    pub(crate) fn derivative_piece(&self, piece: Piece, t: f64) -> f64 {
        let (m, d, delta, a, b) = (self.m, self.d, self.delta, self.a, self.b);
        match piece.0 {
            0 => -d,
            1 => 16.0 * d * a / m * (t - m / (8.0 * a)),
            2 | 5 | 8 => 0.0,
            3 => 16.0 / m * (t - m / 8.0),
            4 | 6 => {
                let u = t / m - 0.5;
                let e = if piece.0 == 4 {
                    5.0 / 16.0 / u + 1.0
                } else {
                    -5.0 / 16.0 / u + 1.0
                };
                let at_pole = if piece.0 == 4 { u >= 0.0 } else { u <= 0.0 };
                if at_pole || e < EXP_UNDERFLOW {
                    0.0
                } else {
                    25.0 / 256.0 * e.exp() / (u * u)
                }
            }
            7 => -16.0 / m * (t - 7.0 * m / 8.0),
            9 => -16.0 * delta * b / m * (t - (16.0 * b - 2.0) * m / (16.0 * b)),
            _ => -delta,
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if (0.0..=self.m).contains(&t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                theta: t,
                m: self.m,
            })
        }
    }
}

/// `f(θ; m, d, δ)` on the closed interval `[0, m]`.
pub fn frankenstein_eval(theta: f64, p: &FrankensteinParams) -> Result<f64> {
    p.check_domain(theta)?;
    Ok(p.eval_piece(p.piece(theta), theta))
}

/// One-sided derivative of `f`. Away from the endpoints both sides agree
/// because `f` is C¹; at `0` only the right side exists and at `m` only the left.
pub fn frankenstein_derivative(theta: f64, p: &FrankensteinParams, side: Side) -> Result<f64> {
    p.check_domain(theta)?;
    match side {
        Side::Left if theta == 0.0 => Err(Error::OutOfDomain { theta, m: p.m }),
        Side::Right if theta == p.m => Err(Error::OutOfDomain { theta, m: p.m }),
        _ => Ok(p.derivative_piece(p.piece(theta), theta)),
    }
}
