use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::error::Error;
use crate::problems::Problem;
use crate::schedules::{SolverParameters, TikhonovSchedule};

use super::state::{SolverState, StoppingCriteria, Stride};
use super::steps::{nadtr_step, nag_step, triga_step, NadtrSettings};
use super::trace::{Status, Trace, TraceRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    Triga {
        schedule: TikhonovSchedule,
        params: SolverParameters,
    },
    Nag {
        s: f64,
        alpha: f64,
    },
    Nadtr(NadtrSettings),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Triga { .. } => "triga",
            Method::Nag { .. } => "nag",
            Method::Nadtr(_) => "nadtr",
        }
    }

    pub fn step_size(&self) -> f64 {
        match self {
            Method::Triga { params, .. } => params.s,
            Method::Nag { s, .. } => *s,
            Method::Nadtr(cfg) => cfg.s,
        }
    }

    fn epsilon(&self, k: u64) -> Option<f64> {
        match self {
            Method::Triga { schedule, .. } => Some(schedule.eps(k)),
            Method::Nag { .. } => None,
            Method::Nadtr(cfg) => Some(cfg.c / (k as f64).powf(cfg.p)),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub stop: StoppingCriteria,
    pub stride: Stride,
    /// Overrides the problem's closed-form optimum in `f_gap`.
    pub reference_value: Option<f64>,
    /// Overrides the problem's minimum-norm solution in `dist_to_xstar`.
    pub x_star: Option<DVector<f64>>,
    /// Inclusive range of `k` whose iterates are kept in full.
    pub iterate_window: Option<(u64, u64)>,
}

#[derive(Debug, ThisError)]
pub enum RunError {
    #[error(transparent)]
    Invalid(#[from] Error),
    /// The partial trace runs up to the last finite iterate.
    #[error("{error}")]
    Diverged { error: Error, trace: Box<Trace> },
}

/// Iterates from `(x₀, x₁)` at `k = 1` until `‖∇f(x_k)‖ ≤ tol` or
/// `k = max_iterations`.
pub fn run(
    problem: &Problem,
    method: &Method,
    init: (DVector<f64>, DVector<f64>),
    options: &RunOptions,
) -> Result<Trace, RunError> {
    options.stop.validate()?;
    let n = problem.dimension();
    for x in [&init.0, &init.1] {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            }
            .into());
        }
    }
    if method.step_size() <= 0.0 {
        return Err(Error::InvalidInput("step size must be positive".into()).into());
    }
    let reference = options.reference_value.or_else(|| problem.optimum_value());
    let x_star = options.x_star.clone().or_else(|| problem.min_norm_solution().ok());

    let mut trace = Trace {
        method: method.name().into(),
        records: Vec::new(),
        status: Status::IterationCap,
        stride: options.stride,
        gradient_tolerance: options.stop.gradient_tolerance,
        reference_value: reference,
        degenerate_steps: Vec::new(),
        iterates: Vec::new(),
    };

    let mut state = SolverState::new(init.0, init.1)?;
    let clock = Instant::now();
    loop {
        let k = state.k;
        let (value, grad) = problem.value_and_gradient(&state.x_cur);
        let grad_norm = grad.norm();
        let converged = options.stop.gradient_tolerance > 0.0 && grad_norm <= options.stop.gradient_tolerance;
        let capped = k >= options.stop.max_iterations;
        if let Some((lo, hi)) = options.iterate_window {
            if (lo..=hi).contains(&k) {
                trace.iterates.push((k, state.x_cur.clone()));
            }
        }
        if converged || capped || options.stride.records(k) {
            trace.records.push(TraceRecord {
                k,
                f_gap: value - reference.unwrap_or(0.0),
                grad_norm,
                velocity: state.velocity(),
                dist_to_xstar: x_star.as_ref().map(|xs| (&state.x_cur - xs).norm()),
                epsilon: method.epsilon(k),
                wall_time: clock.elapsed().as_secs_f64(),
            });
        }
        if converged {
            trace.status = Status::Converged;
            break;
        }
        if capped {
            trace.status = Status::IterationCap;
            break;
        }
        let stepped = match method {
            Method::Triga { schedule, params } => triga_step(state, problem, schedule, params),
            Method::Nag { s, alpha } => nag_step(state, problem, *s, *alpha),
            Method::Nadtr(cfg) => nadtr_step(state, problem, cfg).map(|(next, degenerate)| {
                if degenerate {
                    trace.degenerate_steps.push(k);
                }
                next
            }),
        };
        state = match stepped {
            Ok(next) => next,
            Err(error) => {
                log::warn!("{} diverged at k = {k}", method.name());
                return Err(RunError::Diverged {
                    error,
                    trace: Box::new(trace),
                });
            }
        };
    }
    Ok(trace)
}
