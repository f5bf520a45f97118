//! Tikhonov-regularized inertial gradient methods for smooth convex
//! minimization, with the NAG and NADTR comparison schemes, parameter
//! certification, Lyapunov-energy diagnostics and benchmark metrics.
//!
//! For `f` convex with `L`-Lipschitz gradient and a vanishing schedule
//! `ε_k`, the TRIGA iteration
//!
//! ```text
//! y_k     = x_k + (1 − δ√(sε_k))(x_k − x_{k−1})
//! x_{k+1} = y_k − s(∇f(y_k) + ε_k y_k)
//! ```
//!
//! converges strongly to the minimum-norm minimizer of `f`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod problems;
pub mod rng;
pub mod schedules;
pub mod solvers;

pub use error::{Error, Result};
pub use problems::Problem;
