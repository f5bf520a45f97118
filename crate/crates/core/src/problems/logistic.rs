use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::DesignMatrix;

use super::lipschitz::power_iteration_bound;

/// `log(1 + exp(−u))` without overflow for large `|u|`.
pub fn log1p_exp_neg(u: f64) -> f64 {
    (-u).max(0.0) + (-u.abs()).exp().ln_1p()
}

/// `1 / (1 + exp(u))`, evaluated on the stable branch.
fn sigmoid_neg(u: f64) -> f64 {
    if u >= 0.0 {
        let e = (-u).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + u.exp())
    }
}

/// Average logistic loss `f(x) = (1/m) Σ log(1 + exp(−yᵢ⟨aᵢ, x⟩))`.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    features: DesignMatrix,
    labels: Vec<f64>,
    lipschitz: f64,
}

impl LogisticRegression {
    /// `labels` must be `±1`; the Lipschitz bound is `σ_max(A)² / (4m)`.
    pub fn new(features: DesignMatrix, labels: Vec<f64>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                actual: labels.len(),
            });
        }
        if labels.is_empty() || features.ncols() == 0 {
            return Err(Error::InvalidInput(
                "logistic problem has no samples or features".into(),
            ));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidInput(format!("label {bad} is not ±1")));
        }
        let m = labels.len() as f64;
        let estimate = power_iteration_bound(&features, 1e-12);
        Ok(Self {
            features,
            labels,
            lipschitz: estimate.bound / (4.0 * m),
        })
    }

    pub fn features(&self) -> &DesignMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn sample_count(&self) -> usize {
        self.labels.len()
    }

    pub fn dimension(&self) -> usize {
        self.features.ncols()
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub(crate) fn set_lipschitz(&mut self, value: f64) {
        self.lipschitz = value;
    }

    fn margins(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut z = self.features.mul_vec(x);
        for (zi, yi) in z.iter_mut().zip(&self.labels) {
            *zi *= yi;
        }
        z
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let m = self.labels.len() as f64;
        self.margins(x).iter().map(|&u| log1p_exp_neg(u)).sum::<f64>() / m
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.value_and_gradient(x).1
    }

    pub fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let m = self.labels.len() as f64;
        let margins = self.margins(x);
        let value = margins.iter().map(|&u| log1p_exp_neg(u)).sum::<f64>() / m;
        // d/du log(1+e^{-u}) = -σ(-u)
        let weights = DVector::from_iterator(
            margins.len(),
            margins.iter().zip(&self.labels).map(|(&u, &y)| -y * sigmoid_neg(u) / m),
        );
        (value, self.features.tr_mul_vec(&weights))
    }
}
