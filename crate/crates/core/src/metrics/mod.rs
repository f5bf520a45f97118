//! Empirical rates and Dolan–Moré performance profiles.

mod compare;
mod profile;
mod rate;

pub use compare::{summarize_comparison, Comparison, Criterion, Outcome};
pub use profile::{performance_profile, CostMatrix, PerformanceProfile};
pub use rate::{default_window, fit_log_points, fit_rate, fit_series, RateFit, Series, MIN_FIT_POINTS};
