use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::{Trace, TraceRecord};

/// Least-squares line through `(log k, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (u64, u64),
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    FGap,
    Velocity,
    GradNorm,
    DistToXStar,
}

impl Series {
    fn pick(self, r: &TraceRecord) -> Option<f64> {
        match self {
            Series::FGap => Some(r.f_gap),
            Series::Velocity => Some(r.velocity),
            Series::GradNorm => Some(r.grad_norm),
            Series::DistToXStar => r.dist_to_xstar,
        }
    }
}

pub const MIN_FIT_POINTS: usize = 10;

/// Fits `log(f_gap) ≈ slope·log k + intercept` over records with `k_lo ≤ k ≤ k_hi`.
pub fn fit_rate(trace: &Trace, k_lo: u64, k_hi: u64) -> Result<RateFit> {
    fit_series(&trace.records, Series::FGap, k_lo, k_hi)
}

/// As [`fit_rate`] for any recorded series; nonpositive values are skipped.
pub fn fit_series(records: &[TraceRecord], series: Series, k_lo: u64, k_hi: u64) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| (k_lo..=k_hi).contains(&r.k))
        .filter_map(|r| series.pick(r).map(|v| (r.k, v)))
        .filter(|&(_, v)| v > 0.0 && v.is_finite())
        .map(|(k, v)| ((k as f64).ln(), v.ln()))
        .collect();
    fit_log_points(&points, (k_lo, k_hi))
}

/// Ordinary least squares on already-logged points.
pub fn fit_log_points(points: &[(f64, f64)], window: (u64, u64)) -> Result<RateFit> {
    if window.0 < 1 || window.1 <= window.0 {
        return Err(Error::InvalidInput(format!("fit window {window:?} needs 1 ≤ lo < hi")));
    }
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "{} positive records in {window:?}, need {MIN_FIT_POINTS}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    if points.iter().all(|p| p.1 == points[0].1) && points.iter().any(|p| p.0 != points[0].0) {
        return Ok(RateFit {
            slope: 0.0,
            intercept: points[0].1,
            r_squared: 1.0,
            window,
            points: points.len(),
        });
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all records share one k".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        window,
        points: points.len(),
    })
}

/// `[max(100, k₀), min(10⁴, last k)]`.
pub fn default_window(trace: &Trace, k0: Option<u64>) -> (u64, u64) {
    let lo = 100u64.max(k0.unwrap_or(1));
    let hi = 10_000u64.min(trace.final_k());
    (lo, hi)
}
