use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vanishing regularization sequence `ε_k`, indexed from `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TikhonovSchedule {
    /// `ε_k = k^{−p}` with `0 < p < 2`.
    Power { p: f64 },
    /// `ε_k = c·k^{−2}`.
    Critical { c: f64 },
}

impl TikhonovSchedule {
    /// `p = 2` is folded into `critical(1)`, which is the same sequence.
    pub fn power(p: f64) -> Result<Self> {
        if p == 2.0 {
            return Ok(TikhonovSchedule::Critical { c: 1.0 });
        }
        if !(p > 0.0 && p < 2.0) {
            return Err(Error::InvalidInput(format!(
                "power exponent must lie in (0, 2], got {p}"
            )));
        }
        Ok(TikhonovSchedule::Power { p })
    }

    pub fn critical(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "critical constant must be positive, got {c}"
            )));
        }
        Ok(TikhonovSchedule::Critical { c })
    }

    /// Decay exponent: `p` for power schedules, 2 for the critical one.
    pub fn exponent(&self) -> f64 {
        match *self {
            TikhonovSchedule::Power { p } => p,
            TikhonovSchedule::Critical { .. } => 2.0,
        }
    }

    pub fn epsilon_at(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidInput("schedule index starts at k = 1".into()));
        }
        Ok(self.eps(k))
    }

    /// Unchecked evaluation for `k ≥ 1`.
    #[inline]
    pub fn eps(&self, k: u64) -> f64 {
        debug_assert!(k >= 1);
        let k = k as f64;
        match *self {
            TikhonovSchedule::Power { p } => k.powf(-p),
            TikhonovSchedule::Critical { c } => c / (k * k),
        }
    }
}

impl fmt::Display for TikhonovSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TikhonovSchedule::Power { p } => write!(f, "power:p={p}"),
            TikhonovSchedule::Critical { c } => write!(f, "critical:c={c}"),
        }
    }
}

impl FromStr for TikhonovSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("schedule {s:?} is not power:p=… or critical:c=…"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let (key, value) = rest.split_once('=').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        match (kind.trim(), key.trim()) {
            ("power", "p") => TikhonovSchedule::power(value),
            ("critical", "c") => TikhonovSchedule::critical(value),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(TikhonovSchedule::power(1.0).unwrap().epsilon_at(4).unwrap(), 0.25);
        assert_eq!(TikhonovSchedule::critical(9.0).unwrap().epsilon_at(3).unwrap(), 1.0);
        assert_eq!(TikhonovSchedule::power(0.5).unwrap().epsilon_at(16).unwrap(), 0.25);
    }

    #[test]
    fn index_zero_rejected() {
        assert!(TikhonovSchedule::power(1.0).unwrap().epsilon_at(0).is_err());
    }

    #[test]
    fn power_two_is_critical_one() {
        let a = TikhonovSchedule::power(2.0).unwrap();
        let b = TikhonovSchedule::critical(1.0).unwrap();
        for k in 1..1000 {
            assert_eq!(a.eps(k), b.eps(k));
        }
    }

    #[test]
    fn invalid_constructors() {
        for p in [0.0, -1.0, 2.5, f64::NAN] {
            assert!(TikhonovSchedule::power(p).is_err());
        }
        assert!(TikhonovSchedule::critical(0.0).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["power:p=1.95", "critical:c=9"] {
            let sched: TikhonovSchedule = s.parse().unwrap();
            assert_eq!(sched.to_string(), s);
        }
    }
}
