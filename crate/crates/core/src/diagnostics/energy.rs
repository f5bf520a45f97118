use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::schedules::{SolverParameters, TikhonovSchedule};
use crate::solvers::Trace;

use super::viscosity::{regularized_value, ViscosityCurve};

/// Potential, mixed and kinetic parts of the energy at `k`, with the
/// coefficients of the one-step inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub k: u64,
    pub e_pot: f64,
    pub e_mix: f64,
    pub e_kin: f64,
    pub e_total: f64,
    /// `μ_{k+1}`.
    pub mu_next: f64,
    pub theta: f64,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `k < k₀` or a coefficient denominator is not positive.
    pub pre_regime: bool,
}

/// Scalar coefficients at `k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub mu_next: f64,
    pub theta: f64,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    pub pre_regime: bool,
}

pub fn coefficients(schedule: &TikhonovSchedule, params: &SolverParameters, k: u64) -> Result<Coefficients> {
    if k < 2 {
        return Err(Error::InvalidInput("energy coefficients need k ≥ 2".into()));
    }
    let SolverParameters {
        s,
        delta,
        lambda,
        q,
        a,
        b,
        k0,
    } = *params;
    let e_prev = schedule.eps(k - 1);
    let e0 = schedule.eps(k);
    let e1 = schedule.eps(k + 1);
    let root = (s * e0).sqrt();
    let den_delta = 1.0 - delta * root;
    let den_eps = 1.0 - s * e0;

    let mu_next = (e0 / e1).sqrt() - 1.0 + (delta / den_delta - lambda) * root;
    let dot_prev = e0 - e_prev;
    let dot = e1 - e0;
    let theta = (a + b) * lambda * root * dot_prev * dot_prev / (e_prev * e_prev)
        - (1.0 + q) * s * dot / (den_delta * den_eps) * (1.0 + mu_next);

    Ok(Coefficients {
        mu_next,
        theta,
        tau: lambda * root,
        alpha: (1.0 + q) * s / (den_delta * den_eps),
        beta: q * den_delta,
        pre_regime: den_delta <= 0.0 || den_eps <= 0.0 || k0.is_some_and(|k0| k < k0),
    })
}

/// Energy from explicit iterates and viscosity points `x_{ε_k}`, `x_{ε_{k−1}}`.
#[allow(clippy::too_many_arguments)]
pub fn energy_terms(
    problem: &Problem,
    schedule: &TikhonovSchedule,
    params: &SolverParameters,
    k: u64,
    x_prev: &DVector<f64>,
    x_cur: &DVector<f64>,
    x_eps: &DVector<f64>,
    x_eps_prev: &DVector<f64>,
) -> Result<EnergyBreakdown> {
    let c = coefficients(schedule, params, k)?;
    let eps = schedule.eps(k);
    let gap = regularized_value(problem, eps, x_cur) - regularized_value(problem, eps, x_eps);
    let velocity = x_cur - x_prev;
    let e_pot = c.alpha * gap;
    let e_mix = 0.5 * ((x_cur - x_eps_prev) * c.tau + &velocity).norm_squared();
    let e_kin = 0.5 * c.beta * velocity.norm_squared();
    Ok(EnergyBreakdown {
        k,
        e_pot,
        e_mix,
        e_kin,
        e_total: e_pot + e_mix + e_kin,
        mu_next: c.mu_next,
        theta: c.theta,
        tau: c.tau,
        alpha: c.alpha,
        beta: c.beta,
        pre_regime: c.pre_regime,
    })
}

pub(crate) fn energy_with_curve(
    trace: &Trace,
    k: u64,
    problem: &Problem,
    schedule: &TikhonovSchedule,
    params: &SolverParameters,
    curve: &mut ViscosityCurve<'_>,
) -> Result<EnergyBreakdown> {
    let missing = |i: u64| Error::InvalidInput(format!("iterate x_{i} was not recorded; rerun with stride 1"));
    let x_prev = trace.iterate(k - 1).ok_or_else(|| missing(k - 1))?;
    let x_cur = trace.iterate(k).ok_or_else(|| missing(k))?;
    let x_eps = curve.at(k)?;
    let x_eps_prev = curve.at(k - 1)?;
    energy_terms(problem, schedule, params, k, x_prev, x_cur, &x_eps, &x_eps_prev)
}

/// Energy at `k` from the full iterates stored in `trace`.
pub fn energy_at(
    trace: &Trace,
    k: u64,
    problem: &Problem,
    schedule: &TikhonovSchedule,
    params: &SolverParameters,
) -> Result<EnergyBreakdown> {
    if k < 2 {
        return Err(Error::InvalidInput("energy needs k ≥ 2".into()));
    }
    let mut curve = ViscosityCurve::new(problem, *schedule, 1e-12);
    energy_with_curve(trace, k, problem, schedule, params, &mut curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_fixture() {
        // p = 1, k = 3, s·ε₃ = 1/12, δ = 2, λ = 1
        let params = SolverParameters {
            s: 0.25,
            delta: 2.0,
            lambda: 1.0,
            q: 1.0,
            a: 1.0,
            b: 2.0,
            k0: None,
        };
        let c = coefficients(&TikhonovSchedule::power(1.0).unwrap(), &params, 3).unwrap();
        assert!((c.mu_next - 1.232_050_807_568_877_3).abs() < 1e-14);
        assert!((c.tau - 1.0 / 12f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn theta_positive_for_decreasing_schedule() {
        let params = SolverParameters {
            s: 0.1,
            delta: 1.0,
            lambda: 0.75,
            q: 1.0,
            a: 5.0 / 6.0,
            b: 8.0 / 3.0,
            k0: None,
        };
        let sched = TikhonovSchedule::power(1.5).unwrap();
        for k in 2..2000 {
            let c = coefficients(&sched, &params, k).unwrap();
            if !c.pre_regime {
                assert!(c.theta > 0.0, "k = {k}");
            }
        }
    }
}
