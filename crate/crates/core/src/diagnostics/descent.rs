use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::problems::Problem;
use crate::rng::{gaussian_vector, problem_rng};

use super::viscosity::regularized_value;

/// Regularization weights used for the extended descent inequality.
pub const DESCENT_EPSILONS: [f64; 3] = [1.0, 0.1, 0.01];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentViolation {
    pub sample: usize,
    /// `"descent"` or `"extended-descent(ε)"`.
    pub check: String,
    pub excess: f64,
}

fn relative_slack(terms: &[f64]) -> f64 {
    1e-10 * (1.0 + terms.iter().map(|t| t.abs()).sum::<f64>())
}

/// Samples `(x, y, s)` with `s ∈ (0, 2/L]` and checks the descent inequality on
/// `f` and the extended descent inequality on `φ_ε` (strong convexity `ε`).
pub fn check_descent_lemmas(problem: &Problem, sample_count: usize, seed: u64) -> Vec<DescentViolation> {
    let mut rng = problem_rng(seed ^ 0x5eed);
    let n = problem.dimension();
    let lip = problem.lipschitz();
    let mut out = Vec::new();
    for sample in 0..sample_count {
        let scale = 10f64.powf(rng.random_range(-2.0..1.0));
        let x = gaussian_vector(&mut rng, n) * scale;
        let y = if sample % 7 == 0 {
            x.clone()
        } else {
            gaussian_vector(&mut rng, n) * scale
        };

        let (fx, gx) = problem.value_and_gradient(&x);
        let fy = problem.value(&y);
        let d = &y - &x;
        let inner = gx.dot(&d);
        let quad = 0.5 * lip * d.norm_squared();
        let excess = fy - (fx + inner + quad) - relative_slack(&[fy, fx, inner, quad]);
        if excess > 0.0 {
            out.push(DescentViolation {
                sample,
                check: "descent".into(),
                excess,
            });
        }

        for eps in DESCENT_EPSILONS {
            let lip_phi = lip + eps;
            let s = rng.random_range(0.0..1.0f64).max(1e-3) * 2.0 / lip_phi;
            let gy = problem.gradient(&y) + &y * eps;
            let stepped: DVector<f64> = &y - &gy * s;
            let lhs = regularized_value(problem, eps, &stepped);
            let phi_x = regularized_value(problem, eps, &x);
            let inner = gy.dot(&(&y - &x));
            let curvature = (0.5 * lip_phi * s * s - s) * gy.norm_squared();
            let strong = 0.5 * eps * (&x - &y).norm_squared();
            let rhs = phi_x + inner + curvature - strong;
            let excess = lhs - rhs - relative_slack(&[lhs, phi_x, inner, curvature, strong]);
            if excess > 0.0 {
                out.push(DescentViolation {
                    sample,
                    check: format!("extended-descent({eps})"),
                    excess,
                });
            }
        }
    }
    out
}
