use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::schedules::{SolverParameters, TikhonovSchedule};

use super::state::SolverState;

fn finite_or_diverged(k: u64, v: &DVector<f64>) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { k, norm: v.norm() })
    }
}

/// One TRIGA update:
/// `y = x_k + (1 − δ√(sε_k))(x_k − x_{k−1})`, `x_{k+1} = y − s(∇f(y) + ε_k y)`.
pub fn triga_step(
    state: SolverState,
    problem: &Problem,
    schedule: &TikhonovSchedule,
    params: &SolverParameters,
) -> Result<SolverState> {
    let k = state.k;
    let s = params.s;
    let eps = schedule.epsilon_at(k)?;
    let momentum = 1.0 - params.delta * (s * eps).sqrt();
    let y = &state.x_cur + (&state.x_cur - &state.x_prev) * momentum;
    finite_or_diverged(k, &y)?;
    let grad = problem.gradient(&y);
    let next = &y - (grad + &y * eps) * s;
    finite_or_diverged(k, &next)?;
    Ok(state.advance(next))
}

/// Nesterov step with momentum `1 − α/k`.
pub fn nag_step(state: SolverState, problem: &Problem, s: f64, alpha: f64) -> Result<SolverState> {
    let k = state.k;
    let y = &state.x_cur + (&state.x_cur - &state.x_prev) * (1.0 - alpha / k as f64);
    finite_or_diverged(k, &y)?;
    let next = &y - problem.gradient(&y) * s;
    finite_or_diverged(k, &next)?;
    Ok(state.advance(next))
}

/// Settings of the NADTR comparison method. `q_exp` is its own inertia
/// exponent, unrelated to the admissibility constant `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NadtrSettings {
    pub s: f64,
    pub a: f64,
    pub c: f64,
    pub p: f64,
    pub q_exp: f64,
}

impl NadtrSettings {
    pub fn new(s: f64, p: f64) -> Self {
        NadtrSettings {
            s,
            a: 1.0,
            c: 1.0,
            p,
            q_exp: 0.99,
        }
    }

    /// `k = 1` and integer values of `(cs)^{1/p}` and `(cs)^{1/p} + 1`.
    pub fn skips(&self, k: u64) -> bool {
        if k == 1 {
            return true;
        }
        let root = (self.c * self.s).powf(1.0 / self.p);
        let nearest = root.round();
        if (root - nearest).abs() > 1e-9 || nearest < 1.0 {
            return false;
        }
        let r = nearest as u64;
        k == r || k == r + 1
    }
}

/// Extrapolation coefficients `(B_k, C_k)` of `y_k = x_k + B_k(x_k − x_{k−1}) − C_k x_k`.
///
/// `None` when a denominator vanishes.
pub fn nadtr_coefficients(k: u64, cfg: &NadtrSettings) -> Option<(f64, f64)> {
    let NadtrSettings { s, a, c, p, q_exp: q } = *cfg;
    let kf = k as f64;
    let km = kf - 1.0;
    let cs = c * s;
    let kp = kf.powf(p);
    let kmp = km.powf(p);
    let kq = kf.powf(q);
    let kmq = km.powf(q);
    let d_prev = kmp - cs;
    let d_cur = kp - cs;
    if d_prev == 0.0 || d_cur == 0.0 || km == 0.0 {
        return None;
    }

    let b_num = kp * (a * kmq - s) * (a * d_prev * d_prev * kmq - 2.0 * s * km.powf(2.0 * p));
    let b_den = a * a * km.powf(p + q) * kq * d_prev * d_cur;

    let c_num = 2.0 * s * s * kp * (kmp * kp - c * kmp - a * c * kmq * kp + a * c * km.powf(q + p));
    let c_den = a * a * kmq * kq * d_prev * d_cur * d_cur;

    let (bk, ck) = (b_num / b_den, c_num / c_den);
    (bk.is_finite() && ck.is_finite()).then_some((bk, ck))
}

/// One NADTR update; the flag reports a degenerate coefficient fallback.
pub fn nadtr_step(state: SolverState, problem: &Problem, cfg: &NadtrSettings) -> Result<(SolverState, bool)> {
    let k = state.k;
    let (y, degenerate) = if cfg.skips(k) {
        (state.x_cur.clone(), false)
    } else {
        match nadtr_coefficients(k, cfg) {
            Some((bk, ck)) => (
                &state.x_cur + (&state.x_cur - &state.x_prev) * bk - &state.x_cur * ck,
                false,
            ),
            None => (state.x_cur.clone(), true),
        }
    };
    finite_or_diverged(k, &y)?;
    let shrink = cfg.c * cfg.s / (k as f64).powf(cfg.p);
    let next = &y - problem.gradient(&y) * cfg.s - &y * shrink;
    finite_or_diverged(k, &next)?;
    Ok((state.advance(next), degenerate))
}

#[cfg(test)]
mod tests {
    use nalgebra::{dvector, DMatrix};

    use super::*;
    use crate::problems::LeastSquares;

    fn half_square() -> Problem {
        LeastSquares::new(DMatrix::identity(1, 1).into(), dvector![0.0])
            .unwrap()
            .into()
    }

    fn params(s: f64, delta: f64) -> SolverParameters {
        SolverParameters {
            s,
            delta,
            lambda: 0.5,
            q: 1.0,
            a: 1.0,
            b: 2.0,
            k0: None,
        }
    }

    #[test]
    fn triga_hand_values() {
        let f = half_square();
        let sched = TikhonovSchedule::power(1.0).unwrap();
        let st = SolverState::new(dvector![1.0], dvector![1.0]).unwrap();
        let next = triga_step(st, &f, &sched, &params(0.25, 1.0)).unwrap();
        assert_eq!(next.k, 2);
        assert!((next.x_cur[0] - 0.5).abs() < 1e-15);
        assert_eq!(next.x_prev[0], 1.0);

        let st = SolverState::new(dvector![0.0], dvector![1.0]).unwrap();
        let next = triga_step(st, &f, &sched, &params(0.25, 1.0)).unwrap();
        assert!((next.x_cur[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn nag_hand_values() {
        let f = half_square();
        let st = SolverState {
            k: 6,
            x_prev: dvector![1.0],
            x_cur: dvector![1.0],
        };
        assert!((nag_step(st, &f, 0.5, 3.0).unwrap().x_cur[0] - 0.5).abs() < 1e-15);
        // k = α kills the momentum term
        let st = SolverState {
            k: 3,
            x_prev: dvector![5.0],
            x_cur: dvector![1.0],
        };
        assert!((nag_step(st, &f, 0.5, 3.0).unwrap().x_cur[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn divergence_is_reported() {
        let f = half_square();
        let st = SolverState::new(dvector![0.0], dvector![f64::MAX]).unwrap();
        let err = nag_step(st, &f, 0.5, 3.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { k: 1, .. }));
    }

    #[test]
    fn nadtr_skip_set() {
        let cfg = NadtrSettings::new(0.5, 1.95);
        assert!(cfg.skips(1));
        assert!(!cfg.skips(2));
        // cs = 4, p = 2 → root 2 and 3 are skipped
        let cfg = NadtrSettings {
            s: 4.0,
            ..NadtrSettings::new(4.0, 2.0)
        };
        assert!(cfg.skips(2) && cfg.skips(3) && !cfg.skips(4));
        assert!(nadtr_coefficients(2, &cfg).is_none());
    }
}
