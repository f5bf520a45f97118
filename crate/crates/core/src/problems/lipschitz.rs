use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DesignMatrix;

use super::Problem;

/// Relative inflation applied to the converged Rayleigh quotient.
pub const LIPSCHITZ_SLACK: f64 = 1e-3;

const MAX_POWER_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    pub bound: f64,
    /// Set when the matrix is identically zero.
    pub degenerate: bool,
    pub iterations: usize,
}

/// Upper bound on `σ_max(A)²` by power iteration on `AᵀA`.
///
/// Starts from the normalized vector `(1, 1/2, …, 1/n)` and stops once the
/// Rayleigh quotient changes by less than `tolerance` (relative).
pub fn power_iteration_bound(matrix: &DesignMatrix, tolerance: f64) -> LipschitzEstimate {
    let n = matrix.ncols();
    let mut v = DVector::from_iterator(n, (1..=n).map(|i| 1.0 / i as f64));
    v /= v.norm();
    let mut rayleigh = 0.0;
    let mut iterations = 0;
    while iterations < MAX_POWER_ITERATIONS {
        iterations += 1;
        let w = matrix.tr_mul_vec(&matrix.mul_vec(&v));
        let next = v.dot(&w);
        let w_norm = w.norm();
        if w_norm == 0.0 {
            return LipschitzEstimate {
                bound: 0.0,
                degenerate: true,
                iterations,
            };
        }
        v = w / w_norm;
        let settled = (next - rayleigh).abs() <= tolerance * next.abs();
        rayleigh = next;
        if settled {
            break;
        }
    }
    LipschitzEstimate {
        bound: rayleigh * (1.0 + LIPSCHITZ_SLACK),
        degenerate: false,
        iterations,
    }
}

/// Lipschitz bound of the gradient of a data-driven problem.
///
/// The coupling quadratic is handled through its least-squares form.
pub fn estimate_lipschitz(problem: &Problem, tolerance: f64) -> Result<LipschitzEstimate> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    Ok(match problem {
        Problem::Quadratic(q) => power_iteration_bound(q.as_least_squares().matrix(), tolerance),
        Problem::LeastSquares(ls) => power_iteration_bound(ls.matrix(), tolerance),
        Problem::Logistic(lr) => {
            let mut est = power_iteration_bound(lr.features(), tolerance);
            est.bound /= 4.0 * lr.sample_count() as f64;
            est
        }
    })
}
