use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration counter and the two most recent iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub k: u64,
    pub x_prev: DVector<f64>,
    pub x_cur: DVector<f64>,
}

impl SolverState {
    /// State at `k = 1` holding `(x₀, x₁)`.
    pub fn new(x0: DVector<f64>, x1: DVector<f64>) -> Result<Self> {
        if x0.len() != x1.len() {
            return Err(Error::DimensionMismatch {
                expected: x1.len(),
                actual: x0.len(),
            });
        }
        Ok(SolverState {
            k: 1,
            x_prev: x0,
            x_cur: x1,
        })
    }

    /// `x₀ = x₁ = start`, so the first momentum term vanishes.
    pub fn at_rest(start: DVector<f64>) -> Self {
        SolverState {
            k: 1,
            x_prev: start.clone(),
            x_cur: start,
        }
    }

    pub fn velocity(&self) -> f64 {
        (&self.x_cur - &self.x_prev).norm()
    }

    pub(crate) fn advance(self, next: DVector<f64>) -> Self {
        SolverState {
            k: self.k + 1,
            x_prev: self.x_cur,
            x_cur: next,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingCriteria {
    pub max_iterations: u64,
    /// Zero disables the gradient test and runs to `max_iterations`.
    pub gradient_tolerance: f64,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        StoppingCriteria {
            max_iterations: 100_000,
            gradient_tolerance: 1e-6,
        }
    }
}

impl StoppingCriteria {
    pub fn fixed_budget(max_iterations: u64) -> Self {
        StoppingCriteria {
            max_iterations,
            gradient_tolerance: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || !(self.gradient_tolerance >= 0.0) {
            return Err(Error::InvalidInput(
                "max_iterations must be positive and gradient_tolerance nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Which iterates are written to the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stride {
    /// Every iterate up to `k = 1000`, then every tenth.
    #[default]
    Default,
    Every(u64),
}

impl Stride {
    pub fn records(&self, k: u64) -> bool {
        match *self {
            Stride::Default => k <= 1000 || k.is_multiple_of(10),
            Stride::Every(n) => n <= 1 || k.is_multiple_of(n) || k == 1,
        }
    }
}

impl std::fmt::Display for Stride {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stride::Default => write!(f, "default"),
            Stride::Every(n) => write!(f, "{n}"),
        }
    }
}

impl std::str::FromStr for Stride {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "default" => Ok(Stride::Default),
            n => match n.parse::<u64>() {
                Ok(v) if v > 0 => Ok(Stride::Every(v)),
                _ => Err(Error::InvalidInput(format!(
                    "stride {s:?} is not `default` or a positive integer"
                ))),
            },
        }
    }
}
