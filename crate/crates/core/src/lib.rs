//! First-order optimization with economical, event-driven objective evaluations.
//!
//! The crate is organized around a single evaluation interface,
//! [`DifferentiableProblem`], consumed by two families of solvers:
//!
//! * [`event_driven`]: gradient descent whose inner loop runs without objective
//!   evaluations until a triggering event fires, followed by a single
//!   non-sequential Armijo test that accepts or rejects the terminal iterate.
//! * [`baselines`]: objective-function-free methods (fixed, diminishing,
//!   Barzilai–Borwein, adaptive Lipschitz approximation, Nesterov, WNGrad).
//!
//! [`anticonv`] builds smooth one-dimensional objectives on which the
//! objective-function-free methods diverge, and [`quasi_likelihood`] provides the
//! integral objectives used by the [`harness`] benchmark grid.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anticonv;
pub mod baselines;
pub mod error;
pub mod event_driven;
pub mod harness;
pub mod linalg;
pub mod problem;
pub mod quasi_likelihood;

pub use error::{Error, Result};
pub use problem::{
    finite_difference_gradient, Counted, DifferentiableProblem, SolveReport, Termination,
    TraceEntry,
};
