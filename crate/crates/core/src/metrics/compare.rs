use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::Trace;

use super::profile::{performance_profile, CostMatrix, PerformanceProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    CpuTime,
    Iterations,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::CpuTime => "cpu_time",
            Criterion::Iterations => "iterations",
        }
    }

    /// Cost of a finished run, `None` when it hit the cap unconverged.
    pub fn cost(&self, trace: &Trace) -> Option<f64> {
        let last = trace.last()?;
        if !trace.converged() && last.grad_norm > trace.gradient_tolerance {
            return None;
        }
        Some(match self {
            // clock resolution floor keeps ratios finite
            Criterion::CpuTime => last.wall_time.max(1e-9),
            Criterion::Iterations => last.k as f64,
        })
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cpu_time" | "time" => Ok(Criterion::CpuTime),
            "iterations" => Ok(Criterion::Iterations),
            other => Err(Error::InvalidInput(format!("unknown criterion {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub criterion: Criterion,
    pub costs: CostMatrix,
    pub profile: PerformanceProfile,
}

/// One run outcome: a trace, or `None` for a run that produced no usable
/// trace (for example a divergence or a certification skip).
pub struct Outcome<'a> {
    pub solver: &'a str,
    pub problem: &'a str,
    pub trace: Option<&'a Trace>,
}

/// Builds the cost matrix and profile; every solver must cover every problem.
pub fn summarize_comparison(outcomes: &[Outcome<'_>], criterion: Criterion) -> Result<Comparison> {
    let mut solvers: Vec<String> = Vec::new();
    let mut problems: Vec<String> = Vec::new();
    for o in outcomes {
        if !solvers.iter().any(|s| s == o.solver) {
            solvers.push(o.solver.to_owned());
        }
        if !problems.iter().any(|p| p == o.problem) {
            problems.push(o.problem.to_owned());
        }
    }
    let mut costs = vec![vec![None; problems.len()]; solvers.len()];
    let mut seen = BTreeSet::new();
    for o in outcomes {
        let si = solvers.iter().position(|s| s == o.solver).expect("registered");
        let pi = problems.iter().position(|p| p == o.problem).expect("registered");
        if !seen.insert((si, pi)) {
            return Err(Error::InvalidInput(format!("duplicate run {}/{}", o.solver, o.problem)));
        }
        costs[si][pi] = o.trace.and_then(|t| criterion.cost(t));
    }
    let mut missing = Vec::new();
    for (si, s) in solvers.iter().enumerate() {
        for (pi, p) in problems.iter().enumerate() {
            if !seen.contains(&(si, pi)) {
                missing.push(format!("{s}/{p}"));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Alignment(missing));
    }
    let costs = CostMatrix::new(solvers, problems, costs)?;
    let profile = performance_profile(&costs)?;
    Ok(Comparison {
        criterion,
        costs,
        profile,
    })
}
