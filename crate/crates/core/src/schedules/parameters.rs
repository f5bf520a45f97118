use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The tuple `(s, δ, λ, q, a, b)` plus the certified start index `k₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParameters {
    pub s: f64,
    pub delta: f64,
    pub lambda: f64,
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub k0: Option<u64>,
}

/// `δ = 2^{p/2}/√s`.
pub fn default_delta(p: f64, s: f64) -> f64 {
    2f64.powf(p / 2.0) / s.sqrt()
}

/// Smallest `q` allowed by `Ls < q/(q+1)`, i.e. `Ls/(1 − Ls)`.
pub fn min_q(lipschitz: f64, s: f64) -> Result<f64> {
    let ls = lipschitz * s;
    if !(ls < 1.0) {
        return Err(Error::InvalidInput(format!("L·s = {ls} leaves no admissible q")));
    }
    Ok(ls / (1.0 - ls))
}

/// `max(2·q_min, q_min + 1)`.
pub fn default_q(lipschitz: f64, s: f64) -> Result<f64> {
    let q = min_q(lipschitz, s)?;
    Ok((2.0 * q).max(q + 1.0))
}

/// Largest admissible step, exclusive: `q/((q+1)L)`.
pub fn step_bound(q: f64, lipschitz: f64) -> f64 {
    q / ((q + 1.0) * lipschitz)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    /// Left side minus right side; negative means satisfied.
    pub slack: f64,
}

impl Condition {
    fn strict(name: &str, slack: f64) -> Self {
        Condition {
            name: name.into(),
            holds: slack < 0.0,
            slack,
        }
    }

    pub(crate) fn weak(name: &str, slack: f64) -> Self {
        Condition {
            name: name.into(),
            holds: slack <= 0.0,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K1Report {
    pub conditions: [Condition; 4],
}

impl K1Report {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.holds)
    }
}

/// Slacks of (K1)(i)–(iii), which do not involve `s` or `L`.
pub(crate) fn k1_structural(delta: f64, q: f64, a: f64, b: f64, lambda: f64) -> [f64; 3] {
    let lower = (1.0 + q) * delta / (2.0 + q);
    [
        (lower - lambda).max(lambda - delta),
        (1.0 + a * (1.0 - q)) * lambda - a * delta,
        (1.0 - b) / b * lambda * lambda + delta * lambda - 1.0,
    ]
}

/// Evaluates the four constant-level constraints (K1).
pub fn check_k1(params: &SolverParameters, lipschitz: f64) -> K1Report {
    let SolverParameters {
        s,
        delta,
        lambda,
        q,
        a,
        b,
        ..
    } = *params;
    let [i, ii, iii] = k1_structural(delta, q, a, b, lambda);
    let iv = lipschitz * s - q / (q + 1.0);
    K1Report {
        conditions: [
            Condition::strict("K1(i)", i),
            Condition::strict("K1(ii)", ii),
            Condition::strict("K1(iii)", iii),
            Condition::strict("K1(iv)", iv),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64, q: f64, a: f64, b: f64, lambda: f64, s: f64) -> SolverParameters {
        SolverParameters {
            s,
            delta,
            lambda,
            q,
            a,
            b,
            k0: None,
        }
    }

    #[test]
    fn delta_rule() {
        assert_eq!(default_delta(2.0, 1.0), 2.0);
        assert!((default_delta(1.0, 0.25) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let s = 1.0 / 2.2;
        assert!((default_delta(1.95, s) - 2f64.powf(0.975) * 2.2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn q_rule() {
        let q = default_q(2.0, 1.0 / 2.2).unwrap();
        assert!((q - 20.0).abs() < 1e-12);
        assert!(step_bound(q, 2.0) > 1.0 / 2.2);
        assert!(default_q(1.0, 1.0).is_err());
    }

    #[test]
    fn k1_failures_are_named() {
        let r = check_k1(&params(1.0, 1.0, 1.0, 2.0, 0.5, 0.01), 1.0);
        assert!(!r.conditions[0].holds);
        assert!((r.conditions[0].slack - (2.0 / 3.0 - 0.5)).abs() < 1e-15);
        let r = check_k1(&params(1.0, 1.0, 5.0 / 6.0, 8.0 / 3.0, 0.75, 0.6), 1.0);
        assert_eq!(r.first_failure().unwrap().name, "K1(iv)");
    }
}
