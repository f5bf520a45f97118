//! Objective functions used by the solvers and the benchmark harness.

mod least_squares;
mod libsvm;
mod lipschitz;
mod logistic;
mod matrix_market;
mod quadratic;
mod uri;

use nalgebra::DVector;

use crate::error::{Error, Result};

pub use least_squares::{pseudoinverse_solve, LeastSquares, PSEUDOINVERSE_CUTOFF};
pub use libsvm::{load_libsvm, parse_libsvm, write_libsvm};
pub use lipschitz::{estimate_lipschitz, power_iteration_bound, LipschitzEstimate, LIPSCHITZ_SLACK};
pub use logistic::{log1p_exp_neg, LogisticRegression};
pub use matrix_market::{load_matrix_market, parse_matrix_market};
pub use quadratic::QuadraticCoupling;
pub use uri::{parse_problem_uri, ProblemSpec};

/// A smooth convex objective with an `L`-Lipschitz gradient.
#[derive(Debug, Clone)]
pub enum Problem {
    Quadratic(QuadraticCoupling),
    LeastSquares(LeastSquares),
    Logistic(LogisticRegression),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Quadratic,
    LeastSquares,
    Logistic,
}

impl Problem {
    pub fn family(&self) -> Family {
        match self {
            Problem::Quadratic(_) => Family::Quadratic,
            Problem::LeastSquares(_) => Family::LeastSquares,
            Problem::Logistic(_) => Family::Logistic,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Problem::Quadratic(p) => p.dimension(),
            Problem::LeastSquares(p) => p.dimension(),
            Problem::Logistic(p) => p.dimension(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            Problem::Quadratic(p) => p.lipschitz(),
            Problem::LeastSquares(p) => p.lipschitz(),
            Problem::Logistic(p) => p.lipschitz(),
        }
    }

    /// Replaces the stored Lipschitz constant.
    pub fn with_lipschitz(mut self, value: f64) -> Self {
        match &mut self {
            Problem::Quadratic(p) => p.set_lipschitz(value),
            Problem::LeastSquares(p) => p.set_lipschitz(value),
            Problem::Logistic(p) => p.set_lipschitz(value),
        }
        self
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            Problem::Quadratic(p) => p.value(x),
            Problem::LeastSquares(p) => p.value(x),
            Problem::Logistic(p) => p.value(x),
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Problem::Quadratic(p) => p.gradient(x),
            Problem::LeastSquares(p) => p.gradient(x),
            Problem::Logistic(p) => p.gradient(x),
        }
    }

    pub fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        match self {
            Problem::Quadratic(p) => (p.value(x), p.gradient(x)),
            Problem::LeastSquares(p) => p.value_and_gradient(x),
            Problem::Logistic(p) => p.value_and_gradient(x),
        }
    }

    /// Checked evaluation: rejects wrong lengths and non-finite entries.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("point has non-finite entries".into()));
        }
        Ok(self.value_and_gradient(x))
    }

    /// `min f`, when known in closed form.
    pub fn optimum_value(&self) -> Option<f64> {
        match self {
            Problem::Quadratic(_) => Some(0.0),
            Problem::LeastSquares(p) => Some(p.optimum_value()),
            Problem::Logistic(_) => None,
        }
    }

    /// The least-norm minimizer `x*`.
    pub fn min_norm_solution(&self) -> Result<DVector<f64>> {
        match self {
            Problem::Quadratic(p) => Ok(p.min_norm_solution()),
            Problem::LeastSquares(p) => Ok(p.min_norm_solution()),
            Problem::Logistic(_) => Err(Error::Unsupported("minimum-norm solution")),
        }
    }
}

impl From<QuadraticCoupling> for Problem {
    fn from(p: QuadraticCoupling) -> Self {
        Problem::Quadratic(p)
    }
}

impl From<LeastSquares> for Problem {
    fn from(p: LeastSquares) -> Self {
        Problem::LeastSquares(p)
    }
}

impl From<LogisticRegression> for Problem {
    fn from(p: LogisticRegression) -> Self {
        Problem::Logistic(p)
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::{dvector, DMatrix};

    use super::*;

    #[test]
    fn coupling_at_minimizer_and_offset() {
        let p = Problem::from(QuadraticCoupling::new(1));
        let (v, g) = p.evaluate(&dvector![0.5, 0.5]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(g, dvector![0.0, 0.0]);
        let (v, g) = p.evaluate(&dvector![1.0, 1.0]).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(g, dvector![1.0, 1.0]);
    }

    #[test]
    fn single_sample_logistic() {
        let lr = LogisticRegression::new(DMatrix::from_element(1, 1, 1.0).into(), vec![1.0]).unwrap();
        let (v, g) = Problem::from(lr).evaluate(&dvector![0.0]).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((g[0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_bad_input() {
        let p = Problem::from(QuadraticCoupling::new(2));
        assert!(matches!(
            p.evaluate(&dvector![1.0]),
            Err(Error::DimensionMismatch { expected: 4, actual: 1 })
        ));
        assert!(p.evaluate(&dvector![1.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn min_norm_solutions() {
        let p = Problem::from(QuadraticCoupling::new(10));
        let x = p.min_norm_solution().unwrap();
        assert_eq!(x.len(), 20);
        assert!(x.iter().all(|&v| v == 0.5));

        let ls = LeastSquares::new(DMatrix::identity(3, 3).into(), dvector![1.0, 2.0, 3.0]).unwrap();
        let x = Problem::from(ls).min_norm_solution().unwrap();
        assert!((x - dvector![1.0, 2.0, 3.0]).norm() < 1e-14);

        let ls = LeastSquares::new(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]).into(), dvector![1.0]).unwrap();
        let x = Problem::from(ls).min_norm_solution().unwrap();
        assert!((x - dvector![0.5, 0.5]).norm() < 1e-14);

        let lr = LogisticRegression::new(DMatrix::from_element(1, 1, 1.0).into(), vec![1.0]).unwrap();
        assert!(matches!(
            Problem::from(lr).min_norm_solution(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn lipschitz_override() {
        let p = Problem::from(QuadraticCoupling::new(1)).with_lipschitz(0.8);
        assert_eq!(p.lipschitz(), 0.8);
    }
}
