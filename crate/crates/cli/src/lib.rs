//! Command-line front end: `run`, `sweep`, `check-params`, `diagnose` and `profile`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod exit;
pub mod resolve;

use config::{load_run_config, load_sweep_config, RunConfig, SweepConfig};
use exit::{CliError, CliResult, Exit};

#[derive(Debug, Parser)]
#[command(name = "triga", version, about = "Tikhonov-regularized inertial gradient solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem with one method.
    Run(RunArgs),
    /// Solve every method × problem × p cell and build performance profiles.
    Sweep(SweepArgs),
    /// Select and certify TRIGA parameters without solving.
    CheckParams {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Audit the energy inequality over a finished run directory.
    Diagnose {
        /// Directory holding meta.json, trace.csv and iterates.csv.
        dir: PathBuf,
        /// Audit window `lo:hi`.
        #[arg(long)]
        window: Option<String>,
    },
    /// Build a performance profile from a cost matrix CSV.
    Profile {
        /// `solver,problem,cost` rows; empty cost marks a failure.
        costs: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
}

/// Keys shared by `run`, `check-params` and `sweep`.
#[derive(Debug, Default, Args)]
pub struct SettingsArgs {
    #[arg(long)]
    pub step_frac: Option<String>,
    /// Explicit step size; overrides `--step-frac`.
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub max_iterations: Option<String>,
    /// Gradient-norm tolerance; 0 runs the full budget.
    #[arg(long)]
    pub tolerance: Option<String>,
    /// `default` or a positive integer.
    #[arg(long)]
    pub stride: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Parameter table row, 1 to 6.
    #[arg(long)]
    pub row: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub nadtr_a: Option<String>,
    #[arg(long)]
    pub nadtr_c: Option<String>,
    #[arg(long)]
    pub nadtr_q_exp: Option<String>,
    /// Fail with exit 4 when no k0 is found.
    #[arg(long)]
    pub require_certificate: bool,
    #[arg(long)]
    pub horizon: Option<String>,
    /// Overrides the problem's Lipschitz constant.
    #[arg(long)]
    pub lipschitz: Option<String>,
    /// Extra `key=value` assignments, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl SettingsArgs {
    fn pairs(&self) -> CliResult<Vec<(String, String)>> {
        let named = [
            ("step_frac", &self.step_frac),
            ("s", &self.s),
            ("seed", &self.seed),
            ("max_iterations", &self.max_iterations),
            ("tolerance", &self.tolerance),
            ("stride", &self.stride),
            ("delta", &self.delta),
            ("q", &self.q),
            ("row", &self.row),
            ("alpha", &self.alpha),
            ("nadtr.a", &self.nadtr_a),
            ("nadtr.c", &self.nadtr_c),
            ("nadtr.q_exp", &self.nadtr_q_exp),
            ("horizon", &self.horizon),
            ("lipschitz", &self.lipschitz),
        ];
        let mut out: Vec<(String, String)> = named
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_owned(), v.clone())))
            .collect();
        if self.require_certificate {
            out.push(("require_certificate".into(), "true".into()));
        }
        for raw in &self.set {
            let (k, v) = raw
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("--set {raw:?}: expected KEY=VALUE")))?;
            out.push((k.trim().to_owned(), v.trim().to_owned()));
        }
        Ok(out)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// `key = value` file, or a previous run's meta.json.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem URI, e.g. `quadratic:n=10` or `mm:data/laplace_30.mtx`.
    #[arg(long)]
    pub problem: Option<String>,
    /// `triga`, `nag` or `nadtr`.
    #[arg(long)]
    pub method: Option<String>,
    /// Power schedule ε_k = 1/k^p.
    #[arg(long)]
    pub p: Option<String>,
    /// Critical schedule ε_k = c/k².
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Keep full iterates for `lo:hi`.
    #[arg(long)]
    pub iterates: Option<String>,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

impl RunArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut config = match &self.config {
            Some(path) => load_run_config(path)?,
            None => RunConfig::default(),
        };
        let named = [
            ("problem", self.problem.clone()),
            ("method", self.method.clone()),
            ("p", self.p.clone()),
            ("c", self.c.clone()),
            ("output", self.output.as_ref().map(|p| p.display().to_string())),
            ("iterates", self.iterates.clone()),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                config.set(k, &v)?;
            }
        }
        for (k, v) in self.settings.pairs()? {
            config.set(&k, &v)?;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Repeatable; replaces the configured problem list.
    #[arg(long)]
    pub problem: Vec<String>,
    /// Comma-separated methods.
    #[arg(long)]
    pub methods: Option<String>,
    /// Comma-separated exponents.
    #[arg(long)]
    pub p: Option<String>,
    /// Comma-separated: `cpu_time`, `iterations`.
    #[arg(long)]
    pub criteria: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

impl SweepArgs {
    pub fn resolve(&self) -> CliResult<SweepConfig> {
        let mut config = match &self.config {
            Some(path) => load_sweep_config(path)?,
            None => SweepConfig::default(),
        };
        if !self.problem.is_empty() {
            config.set("problems", &self.problem.join(";"))?;
        }
        let named = [
            ("methods", self.methods.clone()),
            ("p", self.p.clone()),
            ("criteria", self.criteria.clone()),
            ("output", self.output.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                config.set(k, &v)?;
            }
        }
        for (k, v) in self.settings.pairs()? {
            config.set(&k, &v)?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn window(raw: &str) -> CliResult<(u64, u64)> {
    let bad = || CliError::config(format!("--window {raw:?}: expected lo:hi with 2 ≤ lo ≤ hi"));
    let (lo, hi) = raw.split_once(':').ok_or_else(bad)?;
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if lo < 2 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn dispatch(cli: &Cli) -> CliResult<Exit> {
    match &cli.command {
        Command::Run(args) => commands::cmd_run(&args.resolve()?),
        Command::Sweep(args) => commands::cmd_sweep(&args.resolve()?),
        Command::CheckParams { run, report } => commands::cmd_check_params(&run.resolve()?, report.as_deref()),
        Command::Diagnose { dir, window: w } => {
            let w = w.as_deref().map(window).transpose()?;
            commands::cmd_diagnose(dir, w)
        }
        Command::Profile { costs, out } => commands::cmd_profile(costs, out),
    }
}

/// Parses `args` (including the program name) and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Exit::Config.code()
            } else {
                Exit::Ok.code()
            };
        }
    };
    match dispatch(&cli) {
        Ok(exit) => exit.code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit.code()
        }
    }
}
