use nalgebra::{DMatrix, DVector};

use super::least_squares::LeastSquares;

/// `f(x) = ½ Σᵢ (x₂ᵢ₋₁ + x₂ᵢ − 1)²` on `ℝ²ⁿ`.
///
/// Convex but not strongly convex; the solution set is an affine subspace
/// whose least-norm element is the constant vector `½`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCoupling {
    pairs: usize,
    lipschitz: f64,
}

impl QuadraticCoupling {
    pub fn new(pair_count: usize) -> Self {
        assert!(pair_count > 0, "pair_count must be positive");
        Self {
            pairs: pair_count,
            lipschitz: 2.0,
        }
    }

    pub fn pair_count(&self) -> usize {
        self.pairs
    }

    pub fn dimension(&self) -> usize {
        2 * self.pairs
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub(crate) fn set_lipschitz(&mut self, value: f64) {
        self.lipschitz = value;
    }

    fn residuals<'a>(&self, x: &'a DVector<f64>) -> impl Iterator<Item = f64> + 'a {
        x.as_slice().chunks_exact(2).map(|p| p[0] + p[1] - 1.0)
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * self.residuals(x).map(|r| r * r).sum::<f64>()
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(x.len());
        for (i, r) in self.residuals(x).enumerate() {
            g[2 * i] = r;
            g[2 * i + 1] = r;
        }
        g
    }

    pub fn min_norm_solution(&self) -> DVector<f64> {
        DVector::from_element(self.dimension(), 0.5)
    }

    /// The same objective written as `½‖Ax − 1‖²` with one `(…,1,1,…)` row per pair.
    pub fn as_least_squares(&self) -> LeastSquares {
        let n = self.dimension();
        let mut a = DMatrix::zeros(self.pairs, n);
        for i in 0..self.pairs {
            a[(i, 2 * i)] = 1.0;
            a[(i, 2 * i + 1)] = 1.0;
        }
        LeastSquares::new(a.into(), DVector::from_element(self.pairs, 1.0)).expect("coupling matrix is well formed")
    }
}
