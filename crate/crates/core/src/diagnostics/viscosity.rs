use std::collections::BTreeMap;

use nalgebra::{DVector, Dyn};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::schedules::TikhonovSchedule;

/// Inner iteration budget for iterative viscosity solves.
pub const INNER_BUDGET: usize = 100_000;
/// Smallest ε accepted for logistic problems.
pub const LOGISTIC_MIN_EPSILON: f64 = 1e-4;

/// Minimizer of `φ_ε = f + (ε/2)‖·‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscosityPoint {
    pub epsilon: f64,
    pub point: DVector<f64>,
    /// `‖∇φ_ε(point)‖`.
    pub inner_residual: f64,
}

/// `φ_ε(x)`.
pub fn regularized_value(problem: &Problem, epsilon: f64, x: &DVector<f64>) -> f64 {
    problem.value(x) + 0.5 * epsilon * x.norm_squared()
}

fn regularized_gradient(problem: &Problem, epsilon: f64, x: &DVector<f64>) -> DVector<f64> {
    problem.gradient(x) + x * epsilon
}

/// Direct solve for quadratic families, gradient descent with step
/// `2/(L + 2ε)` otherwise.
pub fn viscosity_point(problem: &Problem, epsilon: f64, tolerance: f64) -> Result<ViscosityPoint> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("ε must be positive, got {epsilon}")));
    }
    let point = match problem {
        Problem::Quadratic(q) => {
            // each pair solves (t + t − 1) + εt = 0
            DVector::from_element(q.dimension(), 1.0 / (2.0 + epsilon))
        }
        Problem::LeastSquares(ls) => {
            let (ata, atb) = ls.normal_equations();
            let shifted = ata + nalgebra::DMatrix::<f64>::identity(ata.nrows(), ata.ncols()) * epsilon;
            let chol = nalgebra::Cholesky::<f64, Dyn>::new(shifted)
                .ok_or_else(|| Error::InvalidInput("AᵀA + εI is not positive definite".into()))?;
            chol.solve(atb)
        }
        Problem::Logistic(_) => {
            if epsilon < LOGISTIC_MIN_EPSILON {
                return Err(Error::InvalidInput(format!(
                    "ε = {epsilon} is below {LOGISTIC_MIN_EPSILON} for a logistic problem"
                )));
            }
            return viscosity_point_by_descent(problem, epsilon, tolerance, INNER_BUDGET);
        }
    };
    let inner_residual = regularized_gradient(problem, epsilon, &point).norm();
    Ok(ViscosityPoint {
        epsilon,
        point,
        inner_residual,
    })
}

/// Gradient descent on `φ_ε` from the origin, step `2/(L + 2ε)`.
pub fn viscosity_point_by_descent(
    problem: &Problem,
    epsilon: f64,
    tolerance: f64,
    budget: usize,
) -> Result<ViscosityPoint> {
    let step = 2.0 / (problem.lipschitz() + 2.0 * epsilon);
    let mut x = DVector::zeros(problem.dimension());
    let mut residual = f64::INFINITY;
    for _ in 0..budget {
        let g = regularized_gradient(problem, epsilon, &x);
        residual = g.norm();
        if residual <= tolerance {
            return Ok(ViscosityPoint {
                epsilon,
                point: x,
                inner_residual: residual,
            });
        }
        x -= g * step;
    }
    Err(Error::IncompleteSolve {
        iterations: budget,
        residual,
    })
}

/// Memoized `k ↦ x_{ε_k}`.
#[derive(Debug)]
pub struct ViscosityCurve<'a> {
    problem: &'a Problem,
    schedule: TikhonovSchedule,
    tolerance: f64,
    cache: BTreeMap<u64, DVector<f64>>,
}

impl<'a> ViscosityCurve<'a> {
    pub fn new(problem: &'a Problem, schedule: TikhonovSchedule, tolerance: f64) -> Self {
        ViscosityCurve {
            problem,
            schedule,
            tolerance,
            cache: BTreeMap::new(),
        }
    }

    pub fn at(&mut self, k: u64) -> Result<DVector<f64>> {
        if let Some(x) = self.cache.get(&k) {
            return Ok(x.clone());
        }
        let eps = self.schedule.epsilon_at(k)?;
        let x = viscosity_point(self.problem, eps, self.tolerance)?.point;
        self.cache.insert(k, x.clone());
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::{dvector, DMatrix};

    use super::*;
    use crate::problems::{LeastSquares, QuadraticCoupling};

    fn ls(a: f64, b: f64) -> Problem {
        LeastSquares::new(DMatrix::from_element(1, 1, a).into(), dvector![b])
            .unwrap()
            .into()
    }

    #[test]
    fn scalar_cases() {
        for eps in [1e-3, 0.5, 4.0] {
            let v = viscosity_point(&ls(1.0, 0.0), eps, 1e-12).unwrap();
            assert_eq!(v.point[0], 0.0);
        }
        let v = viscosity_point(&ls(1.0, 1.0), 1.0, 1e-12).unwrap();
        assert!((v.point[0] - 0.5).abs() < 1e-15);
        let v = viscosity_point(&QuadraticCoupling::new(1).into(), 2.0, 1e-12).unwrap();
        assert_eq!(v.point, dvector![0.25, 0.25]);
        assert!(v.inner_residual < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_epsilon() {
        assert!(viscosity_point(&ls(1.0, 1.0), 0.0, 1e-12).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_residual() {
        let err = viscosity_point_by_descent(&ls(1.0, 1.0), 1e-6, 1e-14, 3).unwrap_err();
        assert!(matches!(err, Error::IncompleteSolve { iterations: 3, residual } if residual > 0.0));
    }
}
