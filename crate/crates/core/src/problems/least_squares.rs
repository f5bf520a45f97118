use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::DesignMatrix;

use super::lipschitz::power_iteration_bound;

/// Singular values below this fraction of the largest one are treated as zero
/// when forming the pseudoinverse.
pub const PSEUDOINVERSE_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone)]
struct MinNorm {
    solution: DVector<f64>,
    optimum: f64,
}

/// `f(x) = ½‖Ax − b‖²`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    matrix: DesignMatrix,
    rhs: DVector<f64>,
    lipschitz: f64,
    min_norm: OnceLock<MinNorm>,
    normal: OnceLock<(DMatrix<f64>, DVector<f64>)>,
}

impl LeastSquares {
    /// Builds the problem and bounds its Lipschitz constant by power iteration.
    pub fn new(matrix: DesignMatrix, rhs: DVector<f64>) -> Result<Self> {
        if matrix.nrows() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: rhs.len(),
            });
        }
        if matrix.ncols() == 0 || matrix.nrows() == 0 {
            return Err(Error::InvalidInput("least-squares matrix is empty".into()));
        }
        let estimate = power_iteration_bound(&matrix, 1e-12);
        Ok(Self {
            matrix,
            rhs,
            lipschitz: estimate.bound,
            min_norm: OnceLock::new(),
            normal: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &DesignMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn dimension(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub(crate) fn set_lipschitz(&mut self, value: f64) {
        self.lipschitz = value;
    }

    pub fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        self.matrix.mul_vec(x) - &self.rhs
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * self.residual(x).norm_squared()
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.matrix.tr_mul_vec(&self.residual(x))
    }

    pub fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let r = self.residual(x);
        (0.5 * r.norm_squared(), self.matrix.tr_mul_vec(&r))
    }

    fn min_norm(&self) -> &MinNorm {
        self.min_norm.get_or_init(|| {
            let dense = self.matrix.to_dense();
            let solution = pseudoinverse_solve(&dense, &self.rhs);
            let optimum = 0.5 * (&dense * &solution - &self.rhs).norm_squared();
            MinNorm { solution, optimum }
        })
    }

    /// Least-norm minimizer `A⁺b`.
    pub fn min_norm_solution(&self) -> DVector<f64> {
        self.min_norm().solution.clone()
    }

    /// `min f = ½‖b − AA⁺b‖²`.
    pub fn optimum_value(&self) -> f64 {
        self.min_norm().optimum
    }

    /// Cached `(AᵀA, Aᵀb)`.
    pub fn normal_equations(&self) -> &(DMatrix<f64>, DVector<f64>) {
        self.normal.get_or_init(|| {
            let dense = self.matrix.to_dense();
            (dense.tr_mul(&dense), dense.tr_mul(&self.rhs))
        })
    }
}

/// Solves `min ‖x‖` over `argmin ‖Ax − b‖` through a thin SVD, zeroing
/// singular values below `PSEUDOINVERSE_CUTOFF · σ_max`.
pub fn pseudoinverse_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested Vᵀ");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut x = DVector::zeros(a.ncols());
    if sigma_max == 0.0 {
        return x;
    }
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma <= PSEUDOINVERSE_CUTOFF * sigma_max {
            continue;
        }
        let coeff = u.column(i).dot(b) / sigma;
        x += v_t.row(i).transpose() * coeff;
    }
    x
}
