use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::problems::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: u64,
}

/// Approximates `min f` by accelerated gradient with function-value
/// restarts (step `1/L`) until `‖∇f‖ ≤ tolerance`, keeping the best value seen.
pub fn reference_optimum(
    problem: &Problem,
    start: &DVector<f64>,
    tolerance: f64,
    max_iterations: u64,
) -> ReferenceValue {
    let step = 1.0 / problem.lipschitz();
    let mut x = start.clone();
    let mut x_prev = x.clone();
    let mut t = 1.0f64;
    let mut best = f64::INFINITY;
    let mut last_value = f64::INFINITY;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let y = &x + (&x - &x_prev) * ((t - 1.0) / t_next);
        let g = problem.gradient(&y);
        let next = &y - g * step;
        let (value, grad) = problem.value_and_gradient(&next);
        grad_norm = grad.norm();
        best = best.min(value);
        x_prev = x;
        x = next;
        t = t_next;
        if value > last_value {
            // restart momentum
            t = 1.0;
            x_prev = x.clone();
        }
        last_value = value;
        if grad_norm <= tolerance {
            break;
        }
    }
    ReferenceValue {
        value: best,
        grad_norm,
        iterations,
    }
}
