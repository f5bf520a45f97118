use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::schedules::{SolverParameters, TikhonovSchedule};
use crate::solvers::Trace;

use super::energy::{energy_with_curve, EnergyBreakdown};
use super::viscosity::{regularized_value, ViscosityCurve};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub k: u64,
    /// `E_{k+1} − E_k + μ_{k+1}E_{k+1}`.
    pub lhs: f64,
    /// `(θ_k/2)‖x*‖²`.
    pub rhs: f64,
    pub slack: f64,
    /// `lhs − rhs − slack`; positive is a violation.
    pub margin: f64,
    pub pre_regime: bool,
    /// Pointwise bounds implied by the energy that failed at `k`.
    pub bound_failures: Vec<String>,
}

impl AuditEntry {
    pub fn violated(&self) -> bool {
        !self.pre_regime && (self.margin > 0.0 || !self.margin.is_finite() || !self.bound_failures.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub window: (u64, u64),
    pub entries: Vec<AuditEntry>,
    pub energies: Vec<EnergyBreakdown>,
}

impl AuditReport {
    pub fn violations(&self) -> Vec<&AuditEntry> {
        self.entries.iter().filter(|e| e.violated()).collect()
    }

    pub fn pre_regime_count(&self) -> usize {
        self.entries.iter().filter(|e| e.pre_regime).count()
    }
}

/// Audits the one-step energy inequality for every `k` in `[k_lo, k_hi]`.
///
/// Needs full iterates at `k_lo − 1 ..= k_hi + 1`. Also checks the pointwise
/// consequences: the value gap, the distance to `x_{ε_k}` and the velocity
/// are bounded by the energy, and `φ_k` grows quadratically around `x_{ε_k}`.
pub fn audit_theorem1(
    trace: &Trace,
    window: (u64, u64),
    problem: &Problem,
    schedule: &TikhonovSchedule,
    params: &SolverParameters,
) -> Result<AuditReport> {
    let (k_lo, k_hi) = window;
    if k_lo < 2 || k_hi < k_lo {
        return Err(Error::InvalidInput(format!(
            "audit window {window:?} must satisfy 2 ≤ lo ≤ hi"
        )));
    }
    let x_star = problem.min_norm_solution()?;
    let star_sq = x_star.norm_squared();
    let f_star = problem.optimum_value().ok_or(Error::Unsupported("optimal value"))?;
    let mut curve = ViscosityCurve::new(problem, *schedule, 1e-12);

    let mut energies = Vec::with_capacity((k_hi - k_lo + 2) as usize);
    for k in k_lo..=k_hi + 1 {
        energies.push(energy_with_curve(trace, k, problem, schedule, params, &mut curve)?);
    }

    let mut entries = Vec::with_capacity(energies.len() - 1);
    for pair in energies.windows(2) {
        let (now, next) = (&pair[0], &pair[1]);
        let k = now.k;
        let lhs = next.e_total - now.e_total + now.mu_next * next.e_total;
        let rhs = 0.5 * now.theta * star_sq;
        let slack = 1e-9 * (1.0 + now.e_total + star_sq);

        let eps = schedule.eps(k);
        let x = trace.iterate(k).expect("checked by energy_with_curve");
        let x_eps = curve.at(k)?;
        let mut bound_failures = Vec::new();
        let phi_gap = regularized_value(problem, eps, x) - regularized_value(problem, eps, &x_eps);
        let dist_sq = (x - &x_eps).norm_squared();
        let velocity_sq = (x - trace.iterate(k - 1).expect("checked")).norm_squared();
        let f_gap = problem.value(x) - f_star;
        let checks = [
            ("strong-convexity", 0.5 * eps * dist_sq, phi_gap),
            ("value-gap", f_gap, now.e_total / now.alpha + 0.5 * eps * star_sq),
            ("distance", dist_sq, 2.0 * now.e_total / (now.alpha * eps)),
            ("velocity", velocity_sq, 2.0 * now.e_total / now.beta),
        ];
        for (name, small, big) in checks {
            if small > big + slack {
                bound_failures.push(name.to_owned());
            }
        }

        entries.push(AuditEntry {
            k,
            lhs,
            rhs,
            slack,
            margin: lhs - rhs - slack,
            pre_regime: now.pre_regime,
            bound_failures,
        });
    }
    energies.pop();
    Ok(AuditReport {
        window,
        entries,
        energies,
    })
}
