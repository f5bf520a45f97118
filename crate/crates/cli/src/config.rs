//! Flat `key = value` configuration shared by `run`, `check-params` and `sweep`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use triga::metrics::Criterion;
use triga::schedules::TikhonovSchedule;
use triga::solvers::{StoppingCriteria, Stride};

use crate::exit::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Triga,
    Nag,
    Nadtr,
}

impl MethodKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::Triga => "triga",
            MethodKind::Nag => "nag",
            MethodKind::Nadtr => "nadtr",
        }
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "triga" => Ok(MethodKind::Triga),
            "nag" => Ok(MethodKind::Nag),
            "nadtr" => Ok(MethodKind::Nadtr),
            other => Err(format!("unknown method {other:?} (triga, nag, nadtr)")),
        }
    }
}

/// `s = 1/(frac·L)` or an explicit `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum StepRule {
    Fraction { frac: f64 },
    Explicit { s: f64 },
}

impl StepRule {
    pub fn step(&self, lipschitz: f64) -> f64 {
        match *self {
            StepRule::Fraction { frac } => 1.0 / (frac * lipschitz),
            StepRule::Explicit { s } => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NadtrOptions {
    pub a: f64,
    pub c: f64,
    /// NADTR's own inertia exponent.
    pub q_exp: f64,
}

impl Default for NadtrOptions {
    fn default() -> Self {
        NadtrOptions {
            a: 1.0,
            c: 1.0,
            q_exp: 0.99,
        }
    }
}

/// Settings shared by single runs and sweep cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSettings {
    pub step: StepRule,
    pub seed: u64,
    pub stop: StoppingCriteria,
    pub stride: Stride,
    pub delta: Option<f64>,
    pub q: Option<f64>,
    pub row: Option<u8>,
    pub alpha: f64,
    pub nadtr: NadtrOptions,
    pub require_certificate: bool,
    pub horizon: u64,
    /// Overrides the problem's own Lipschitz bound.
    pub lipschitz: Option<f64>,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            step: StepRule::Fraction { frac: 1.1 },
            seed: 0,
            stop: StoppingCriteria::default(),
            stride: Stride::Default,
            delta: None,
            q: None,
            row: None,
            alpha: 3.0,
            nadtr: NadtrOptions::default(),
            require_certificate: false,
            horizon: 1_000_000,
            lipschitz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: String,
    pub method: MethodKind,
    pub schedule: TikhonovSchedule,
    pub settings: SolveSettings,
    pub output: PathBuf,
    /// Inclusive range of `k` whose full iterates are written.
    pub iterates: Option<(u64, u64)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: String::new(),
            method: MethodKind::Triga,
            schedule: TikhonovSchedule::Power { p: 1.95 },
            settings: SolveSettings::default(),
            output: PathBuf::from("out"),
            iterates: None,
        }
    }
}

pub const DEFAULT_P_GRID: [f64; 7] = [0.3, 0.6, 0.9, 1.2, 1.5, 1.95, 1.99];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub problems: Vec<String>,
    pub methods: Vec<MethodKind>,
    pub p_values: Vec<f64>,
    pub criteria: Vec<Criterion>,
    pub settings: SolveSettings,
    pub output: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            problems: Vec::new(),
            methods: vec![MethodKind::Triga, MethodKind::Nadtr],
            p_values: DEFAULT_P_GRID.to_vec(),
            criteria: vec![Criterion::CpuTime, Criterion::Iterations],
            settings: SolveSettings::default(),
            output: PathBuf::from("sweep"),
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::config(format!("field `{key}`: cannot use {value:?}: {why}"))
}

fn number<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| bad(key, value, e))
}

fn positive(key: &str, value: &str) -> CliResult<f64> {
    let v: f64 = number(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, value, "must be a positive number"))
    }
}

fn boolean(key: &str, value: &str) -> CliResult<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

fn range(key: &str, value: &str) -> CliResult<(u64, u64)> {
    let (lo, hi) = value.split_once(':').ok_or_else(|| bad(key, value, "expected lo:hi"))?;
    let (lo, hi) = (number::<u64>(key, lo)?, number::<u64>(key, hi)?);
    if lo == 0 || hi < lo {
        return Err(bad(key, value, "need 1 ≤ lo ≤ hi"));
    }
    Ok((lo, hi))
}

fn schedule(key: &str, value: &str) -> CliResult<TikhonovSchedule> {
    let parsed = match key {
        "p" => TikhonovSchedule::power(number(key, value)?),
        "c" => TikhonovSchedule::critical(number(key, value)?),
        _ => value.parse::<TikhonovSchedule>(),
    };
    parsed.map_err(|e| bad(key, value, e))
}

impl SolveSettings {
    /// Applies one shared key; `Ok(false)` when the key is not a shared one.
    fn set(&mut self, key: &str, value: &str) -> CliResult<bool> {
        match key {
            "step_frac" => {
                self.step = StepRule::Fraction {
                    frac: positive(key, value)?,
                }
            }
            "s" => {
                self.step = StepRule::Explicit {
                    s: positive(key, value)?,
                }
            }
            "seed" => self.seed = number(key, value)?,
            "max_iterations" => {
                self.stop.max_iterations = number(key, value)?;
                if self.stop.max_iterations == 0 {
                    return Err(bad(key, value, "must be positive"));
                }
            }
            "tolerance" => {
                let t: f64 = number(key, value)?;
                if !(t >= 0.0) {
                    return Err(bad(key, value, "must be nonnegative"));
                }
                self.stop.gradient_tolerance = t;
            }
            "stride" => self.stride = value.parse().map_err(|e| bad(key, value, e))?,
            "delta" => self.delta = Some(positive(key, value)?),
            "q" => self.q = Some(positive(key, value)?),
            "row" => {
                let r: u8 = number(key, value)?;
                if !(1..=6).contains(&r) {
                    return Err(bad(key, value, "table rows are 1 to 6"));
                }
                self.row = Some(r);
            }
            "alpha" => self.alpha = positive(key, value)?,
            "nadtr.a" => self.nadtr.a = positive(key, value)?,
            "nadtr.c" => self.nadtr.c = positive(key, value)?,
            "nadtr.q_exp" => self.nadtr.q_exp = positive(key, value)?,
            "require_certificate" => self.require_certificate = boolean(key, value)?,
            "horizon" => {
                self.horizon = number(key, value)?;
                if self.horizon < 2 {
                    return Err(bad(key, value, "must be at least 2"));
                }
            }
            "lipschitz" => self.lipschitz = Some(positive(key, value)?),
            _ => return Ok(false),
        }
        Ok(true)
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if self.settings.set(key, value)? {
            return Ok(());
        }
        match key {
            "problem" => self.problem = value.trim().to_owned(),
            "method" => self.method = value.parse().map_err(|e| bad(key, value, e))?,
            "p" | "c" | "schedule" => self.schedule = schedule(key, value)?,
            "output" => self.output = PathBuf::from(value.trim()),
            "iterates" => self.iterates = Some(range(key, value)?),
            _ => return Err(CliError::config(format!("unknown field `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.problem.is_empty() {
            return Err(CliError::config("field `problem` is required"));
        }
        Ok(())
    }
}

impl SweepConfig {
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if self.settings.set(key, value)? {
            return Ok(());
        }
        let list = || value.split(';').map(str::trim).filter(|v| !v.is_empty());
        match key {
            "problems" => self.problems = list().map(str::to_owned).collect(),
            "problem" => self.problems.push(value.trim().to_owned()),
            "methods" => {
                self.methods = list()
                    .flat_map(|v| v.split(','))
                    .map(|v| v.parse().map_err(|e| bad(key, value, e)))
                    .collect::<CliResult<_>>()?
            }
            "p" | "p_values" => {
                self.p_values = value
                    .split([',', ';'])
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| {
                        let p = number::<f64>(key, v)?;
                        if p > 0.0 && p < 2.0 {
                            Ok(p)
                        } else {
                            Err(bad(key, v, "p must lie in (0, 2)"))
                        }
                    })
                    .collect::<CliResult<_>>()?
            }
            "criteria" => {
                self.criteria = value
                    .split([',', ';'])
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| v.parse().map_err(|e| bad(key, v, e)))
                    .collect::<CliResult<_>>()?
            }
            "output" => self.output = PathBuf::from(value.trim()),
            _ => return Err(CliError::config(format!("unknown field `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.problems.is_empty() {
            return Err(CliError::config("field `problems` is empty"));
        }
        if self.methods.is_empty() {
            return Err(CliError::config("field `methods` is empty"));
        }
        if self.p_values.is_empty() {
            return Err(CliError::config("field `p_values` is empty"));
        }
        if self.criteria.is_empty() {
            return Err(CliError::config("field `criteria` is empty"));
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str, origin: &Path) -> CliResult<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("{}:{}: expected `key = value`", origin.display(), i + 1)))?;
        pairs.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(pairs)
}

/// Reads a flat config file, or the `config` object of a `meta.json`.
pub fn load_run_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        let meta: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let config = meta.get("config").cloned().unwrap_or(meta);
        return serde_json::from_value(config).map_err(|e| CliError::config(format!("{}: {e}", path.display())));
    }
    let mut config = RunConfig::default();
    for (k, v) in parse_pairs(&text, path)? {
        config.set(&k, &v)?;
    }
    Ok(config)
}

pub fn load_sweep_config(path: &Path) -> CliResult<SweepConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut config = SweepConfig::default();
    for (k, v) in parse_pairs(&text, path)? {
        config.set(&k, &v)?;
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_values_win() {
        let mut c = RunConfig::default();
        for (k, v) in parse_pairs("problem = quadratic:n=3\np = 1.5 # comment\n", Path::new("x")).unwrap() {
            c.set(&k, &v).unwrap();
        }
        c.set("p", "0.6").unwrap();
        assert_eq!(c.schedule, TikhonovSchedule::Power { p: 0.6 });
        assert_eq!(c.problem, "quadratic:n=3");
    }

    #[test]
    fn errors_name_the_field() {
        let mut c = RunConfig::default();
        let e = c.set("step_frac", "-1").unwrap_err();
        assert!(e.message.contains("step_frac"), "{e}");
        let e = c.set("bogus", "1").unwrap_err();
        assert!(e.message.contains("bogus"));
    }

    #[test]
    fn sweep_lists() {
        let mut c = SweepConfig::default();
        c.set("problems", "quadratic:n=2; gaussian:m=5,n=4").unwrap();
        c.set("methods", "triga,nadtr").unwrap();
        c.set("p", "0.6,1.95").unwrap();
        assert_eq!(c.problems, vec!["quadratic:n=2", "gaussian:m=5,n=4"]);
        assert_eq!(c.p_values, vec![0.6, 1.95]);
        assert!(c.set("p", "2.5").is_err());
    }
}
