use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problems::Problem;
use crate::schedules::TikhonovSchedule;

use super::viscosity::{regularized_value, ViscosityCurve};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub k: u64,
    pub check: String,
    /// Amount by which the inequality fails, after slack.
    pub excess: f64,
}

fn push(out: &mut Vec<Violation>, k: u64, check: &str, lhs: f64, rhs: f64, slack: f64) {
    let excess = lhs - rhs - slack;
    if excess > 0.0 || !excess.is_finite() {
        out.push(Violation {
            k,
            check: check.into(),
            excess,
        });
    }
}

/// Checks the viscosity-curve properties for `k` in `ks` against the
/// problem's own curve.
pub fn check_viscosity_lemmas(
    problem: &Problem,
    schedule: &TikhonovSchedule,
    ks: std::ops::RangeInclusive<u64>,
) -> Result<Vec<Violation>> {
    let x_star = problem.min_norm_solution()?;
    let mut curve = ViscosityCurve::new(problem, *schedule, 1e-12);
    let indices: Vec<u64> = (*ks.start()..=*ks.end() + 1).collect();
    let points = indices.iter().map(|&k| curve.at(k)).collect::<Result<Vec<_>>>()?;
    check_viscosity_curve(problem, schedule, &x_star, *ks.start(), &points)
}

/// Same checks for a supplied curve; `points[i]` stands for `x_{ε_{k_first+i}}`
/// and must extend one index past the last checked `k`.
pub fn check_viscosity_curve(
    problem: &Problem,
    schedule: &TikhonovSchedule,
    x_star: &DVector<f64>,
    k_first: u64,
    points: &[DVector<f64>],
) -> Result<Vec<Violation>> {
    let star_norm = x_star.norm();
    let slack = 1e-8 * (1.0 + star_norm * star_norm);
    let mut out = Vec::new();
    for (i, pair) in points.windows(2).enumerate() {
        let k = k_first + i as u64;
        let (cur, next) = (&pair[0], &pair[1]);
        let e0 = schedule.epsilon_at(k)?;
        let e1 = schedule.epsilon_at(k + 1)?;

        push(&mut out, k, "L1-i", cur.norm(), star_norm, slack);
        push(
            &mut out,
            k,
            "L1-ii",
            (next - x_star).norm(),
            (cur - x_star).norm(),
            slack,
        );

        let phi0 = regularized_value(problem, e0, cur);
        let phi1 = regularized_value(problem, e1, next);
        push(
            &mut out,
            k,
            "L2-i",
            phi0 - phi1,
            0.5 * (e0 - e1) * next.norm_squared(),
            slack,
        );
        push(
            &mut out,
            k,
            "L2-ii",
            (next - cur).norm(),
            (e0 - e1) / e0 * next.norm(),
            slack,
        );
    }
    Ok(out)
}
