//! Per-index admissibility (K0), the empirical `k₀` scan, and the
//! admissible constant for the critical schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::parameters::{Condition, SolverParameters};
use super::tikhonov::TikhonovSchedule;

/// Exhaustively checked indices after a candidate `k₀`.
pub const EXHAUSTIVE_PREFIX: u64 = 1000;
/// Ratio of the geometric grid past the prefix.
pub const GRID_RATIO: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K0Report {
    pub k: u64,
    /// `1 − δ√(sε_k) ≤ 0` or `1 − sε_k ≤ 0`; the inequalities are then void.
    pub pre_regime: bool,
    pub conditions: [Condition; 4],
}

impl K0Report {
    pub fn passed(&self) -> bool {
        !self.pre_regime && self.conditions.iter().all(|c| c.holds)
    }

    /// Name of the first failing condition, or `"pre-regime"`.
    pub fn failure(&self) -> Option<&str> {
        if self.pre_regime {
            return Some("pre-regime");
        }
        self.conditions.iter().find(|c| !c.holds).map(|c| c.name.as_str())
    }
}

/// Evaluates (K0)(i)–(iv) at index `k`.
pub fn check_k0_at(params: &SolverParameters, schedule: &TikhonovSchedule, lipschitz: f64, k: u64) -> Result<K0Report> {
    if k == 0 {
        return Err(Error::InvalidInput("schedule index starts at k = 1".into()));
    }
    Ok(k0_report(params, schedule, lipschitz, k))
}

fn k0_report(params: &SolverParameters, schedule: &TikhonovSchedule, lipschitz: f64, k: u64) -> K0Report {
    let SolverParameters {
        s,
        delta,
        lambda,
        q,
        a,
        b,
        ..
    } = *params;
    let e0 = schedule.eps(k);
    let e1 = schedule.eps(k + 1);
    let root0 = (s * e0).sqrt();
    let root1 = (s * e1).sqrt();
    let den = 1.0 - delta * root0;
    let pre_regime = den <= 0.0 || 1.0 - s * e0 <= 0.0;

    let diff = 1.0 / root1 - 1.0 / root0;
    let i = (1.0 + q) * (diff + delta / den - lambda) - lambda * (e1 / e0).sqrt();
    let ii = (1.0 - b) / b * lambda * lambda + delta * lambda / den - 1.0;
    let iii = (1.0 + a * (1.0 - q)) * lambda / a - delta + (1.0 + q) * diff + q * delta * delta * root1 / den;
    let iv = lipschitz * s * (1.0 + lambda * root1) + q * ((lipschitz + e0) * s - 1.0);

    K0Report {
        k,
        pre_regime,
        conditions: [
            Condition::weak("K0(i)", i),
            Condition::weak("K0(ii)", ii),
            Condition::weak("K0(iii)", iii),
            Condition::weak("K0(iv)", iv),
        ],
    }
}

/// Requirement on the constants that (K0) imposes at every index.
pub const STANDING: &str = "K0(a, b, q, s, λ > 0 and λ < δ)";

/// Outcome of a successful scan. Certification is empirical: it covers the
/// evaluated indices up to `verified_up_to` only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub k0: u64,
    pub verified_up_to: u64,
    pub checked_indices: usize,
    /// Largest slack seen per condition over the checked indices.
    pub worst_slack: [f64; 4],
    /// Whether the (K0)(i) left side was nonincreasing along the checked
    /// indices; `false` downgrades the extrapolation past the horizon.
    pub monotone_tail: bool,
}

fn scan_indices(k0: u64, k_max: u64) -> impl Iterator<Item = u64> {
    let prefix_end = (k0 + EXHAUSTIVE_PREFIX).min(k_max);
    let grid = std::iter::successors(Some(prefix_end), move |&k| {
        (k < k_max).then(|| ((k as f64 * GRID_RATIO).ceil() as u64).clamp(k + 1, k_max))
    })
    .skip(1);
    (k0..=prefix_end).chain(grid)
}

/// Scans for the first `k₀ ≤ k_max` after which (K0) holds on the exhaustive
/// prefix `[k₀, k₀+1000]` and on the geometric grid up to `k_max`.
///
/// Candidates advance to one past each violation found, so `k₀` is one past
/// the last observed violation. Tuples outside `0 < λ < δ` (or with a
/// nonpositive constant) fail before any index is scanned.
pub fn find_k0(
    params: &SolverParameters,
    schedule: &TikhonovSchedule,
    lipschitz: f64,
    k_max: u64,
) -> Result<Certificate> {
    if k_max < 2 {
        return Err(Error::InvalidInput("k_max must be at least 2".into()));
    }
    let SolverParameters {
        s,
        delta,
        lambda,
        q,
        a,
        b,
        ..
    } = *params;
    if !([s, q, a, b, lambda].iter().all(|v| *v > 0.0) && lambda < delta) {
        return Err(Error::Certification {
            condition: STANDING.into(),
            last_k: 1,
            k_max,
        });
    }
    let mut candidate = 1u64;
    let mut last_failure: Option<(u64, String)> = None;
    'candidates: while candidate <= k_max {
        let mut worst = [f64::NEG_INFINITY; 4];
        let mut previous_i = f64::INFINITY;
        let mut monotone = true;
        let mut checked = 0usize;
        for k in scan_indices(candidate, k_max) {
            let report = k0_report(params, schedule, lipschitz, k);
            if let Some(name) = report.failure() {
                last_failure = Some((k, name.to_owned()));
                candidate = k + 1;
                continue 'candidates;
            }
            checked += 1;
            for (w, c) in worst.iter_mut().zip(&report.conditions) {
                *w = w.max(c.slack);
            }
            let lhs = report.conditions[0].slack;
            if lhs > previous_i + 1e-12 * previous_i.abs().max(1.0) {
                monotone = false;
            }
            previous_i = lhs;
        }
        if !monotone {
            log::warn!("(K0)(i) left side is not monotone past k0 = {candidate}");
        }
        return Ok(Certificate {
            k0: candidate,
            verified_up_to: k_max,
            checked_indices: checked,
            worst_slack: worst,
            monotone_tail: monotone,
        });
    }
    let (last_k, condition) = last_failure.expect("a failure precedes exhaustion");
    Err(Error::Certification {
        condition,
        last_k,
        k_max,
    })
}

/// Three margins whose minimum `m` gives `c_min = 1/(s·m²)`.
pub fn critical_margins(params: &SolverParameters) -> [f64; 3] {
    let SolverParameters {
        delta, lambda, q, a, ..
    } = *params;
    [
        (2.0 + q) * lambda / (1.0 + q) - delta,
        (delta - (1.0 + a * (1.0 - q)) * lambda / a) / (1.0 + q),
        delta - lambda,
    ]
}

/// Any `c > c_min` is admissible for `ε_k = c/k²`.
pub fn critical_c_bound(params: &SolverParameters) -> Result<f64> {
    let margins = critical_margins(params);
    let m = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(m > 0.0) {
        return Err(Error::NoAdmissibleConstant(format!(
            "margins {margins:?} are not all positive"
        )));
    }
    Ok(1.0 / (params.s * m * m))
}
