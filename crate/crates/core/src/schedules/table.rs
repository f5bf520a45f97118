//! Parameter choices for `(a, b, λ)` given `δ` and `q`, one rule per row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::parameters::{k1_structural, step_bound, SolverParameters};

/// Rows 1–3 cover `δ < 2`, rows 4–6 cover `δ ≥ 2`; within each half the
/// rows are `q ≤ 1` with bounded `a`, `q ≤ 1` with `a > 1/q`, and `q > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow(u8);

impl TableRow {
    pub fn new(row: u8) -> Result<Self> {
        if (1..=6).contains(&row) {
            Ok(TableRow(row))
        } else {
            Err(Error::InvalidInput(format!("table row {row} does not exist")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// Default row for `(δ, q)`: the bounded-`a` row when `q ≤ 1`.
    pub fn default_for(delta: f64, q: f64) -> Self {
        match (delta < 2.0, q <= 1.0) {
            (true, true) => TableRow(1),
            (true, false) => TableRow(3),
            (false, true) => TableRow(4),
            (false, false) => TableRow(6),
        }
    }

    fn admits(self, delta: f64, q: f64) -> bool {
        let small_delta = delta < 2.0;
        match self.0 {
            1 | 2 => small_delta && q <= 1.0,
            3 => small_delta && q > 1.0,
            4 | 5 => !small_delta && q <= 1.0,
            _ => !small_delta && q > 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub row: TableRow,
    pub delta: f64,
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub a_interval: (f64, Option<f64>),
    pub b_lower: f64,
    pub lambda_interval: (f64, f64),
    /// Exclusive upper bound on `s`.
    pub step_bound: f64,
}

impl Selection {
    /// Attaches a step size; fails when `s` violates (K1)(iv).
    pub fn parameters(&self, s: f64) -> Result<SolverParameters> {
        if !(s > 0.0 && s < self.step_bound) {
            return Err(Error::Selection {
                row: format!("row {}", self.row.number()),
                constraint: format!("K1(iv): s = {s} must lie in (0, {})", self.step_bound),
            });
        }
        Ok(SolverParameters {
            s,
            delta: self.delta,
            lambda: self.lambda,
            q: self.q,
            a: self.a,
            b: self.b,
            k0: None,
        })
    }
}

fn widen(lower: f64) -> f64 {
    (2.0 * lower).max(lower + 1.0)
}

/// Upper root of `((1−b)/b)λ² + δλ − 1`.
fn lambda_plus(delta: f64, b: f64) -> f64 {
    b / (2.0 * (b - 1.0)) * (delta + (delta * delta + 4.0 * (1.0 - b) / b).sqrt())
}

fn b_hat(delta: f64, q: f64, a: f64) -> f64 {
    let denom = delta * delta * a * (a * q - 1.0) + (1.0 + a * (1.0 - q)).powi(2);
    (a * delta).powi(2) / denom
}

pub fn select_parameters(delta: f64, q: f64, lipschitz: f64) -> Result<Selection> {
    select_parameters_in_row(TableRow::default_for(delta, q), delta, q, lipschitz)
}

/// Midpoint for bounded intervals, `2 × lower` for those unbounded above,
/// `b = max(2·lower, lower + 1)`.
pub fn select_parameters_in_row(row: TableRow, delta: f64, q: f64, lipschitz: f64) -> Result<Selection> {
    let fail = |constraint: String| Error::Selection {
        row: format!("row {}", row.number()),
        constraint,
    };
    if !(delta > 0.0 && q > 0.0 && lipschitz >= 0.0) {
        return Err(fail(format!(
            "need δ > 0, q > 0, L ≥ 0 (got δ={delta}, q={q}, L={lipschitz})"
        )));
    }
    if !row.admits(delta, q) {
        return Err(fail(format!("(δ, q) = ({delta}, {q}) is outside this row")));
    }

    let lambda_floor = (1.0 + q) * delta / (2.0 + q);
    let bounded_a = || -> (f64, f64) { ((q + 1.0) / (q * q + q + 1.0), 1.0 / q) };

    let (a_interval, a, b_lower, lambda_lo, lambda_hi) = match row.number() {
        1..=3 => {
            let b_lower = 4.0 / (4.0 - delta * delta);
            let (a_interval, a, lambda_hi) = match row.number() {
                1 => {
                    let (lo, hi) = bounded_a();
                    let a = 0.5 * (lo + hi);
                    ((lo, Some(hi)), a, a * delta / (1.0 + a * (1.0 - q)))
                }
                2 => ((1.0 / q, None), 2.0 / q, delta),
                _ => ((1.0 / (q - 1.0), None), 2.0 / (q - 1.0), delta),
            };
            (a_interval, a, b_lower, lambda_floor, lambda_hi)
        }
        _ => {
            let r = 1.0 + (1.0 - 4.0 / (delta * delta)).sqrt();
            let (a_interval, a, b_lower, lambda_hi) = match row.number() {
                4 => {
                    let (lo, hi) = bounded_a();
                    let lo = lo.max(r / (2.0 - r * (1.0 - q)));
                    if !(lo < hi) {
                        return Err(fail(format!("a-interval ({lo}, {hi}] is empty")));
                    }
                    let a = 0.5 * (lo + hi);
                    ((lo, Some(hi)), a, b_hat(delta, q, a), a * delta / (1.0 + a * (1.0 - q)))
                }
                // b > δ² as well, otherwise (λ̂, δ) can be empty
                5 => {
                    let a = 2.0 / q;
                    ((1.0 / q, None), a, b_hat(delta, q, a).max(delta * delta), delta)
                }
                _ => ((1.0 / (q - 1.0), None), 2.0 / (q - 1.0), delta * delta, delta),
            };
            if !(b_lower > 0.0 && b_lower.is_finite()) {
                return Err(fail(format!("b lower bound {b_lower} is not a positive number")));
            }
            let b = widen(b_lower);
            let lambda_lo = lambda_floor.max(lambda_plus(delta, b));
            (a_interval, a, b_lower, lambda_lo, lambda_hi)
        }
    };

    let b = widen(b_lower);
    if !(lambda_lo < lambda_hi) {
        return Err(fail(format!("λ-interval ({lambda_lo}, {lambda_hi}) is empty")));
    }
    let lambda = 0.5 * (lambda_lo + lambda_hi);

    let slacks = k1_structural(delta, q, a, b, lambda);
    for (name, slack) in ["K1(i)", "K1(ii)", "K1(iii)"].iter().zip(slacks) {
        if !(slack < 0.0) {
            return Err(fail(format!("{name} slack {slack} is not negative")));
        }
    }

    Ok(Selection {
        row,
        delta,
        q,
        a,
        b,
        lambda,
        a_interval,
        b_lower,
        lambda_interval: (lambda_lo, lambda_hi),
        step_bound: step_bound(q, lipschitz),
    })
}
