use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use triga::rng::GENERATOR;
use triga::schedules::TikhonovSchedule;
use triga::solvers::{run, Method, RunError, RunOptions, Status, Trace};

use crate::config::{MethodKind, RunConfig, SolveSettings};
use crate::exit::{CliError, CliResult, Exit};
use crate::resolve::{load_problem, resolve_method, LoadedProblem, TrigaResolution};

#[derive(Debug, Serialize)]
pub struct RunMeta<'a> {
    pub config: &'a RunConfig,
    pub problem_uri: &'a str,
    pub seed: u64,
    pub generator: &'static str,
    pub dimension: usize,
    pub lipschitz: f64,
    pub step_size: f64,
    pub method: &'a Method,
    pub triga: Option<&'a TrigaResolution>,
    pub status: &'static str,
    pub final_k: u64,
    pub final_grad_norm: Option<f64>,
    pub final_f_gap: Option<f64>,
    pub wall_time: f64,
    pub reference_value: Option<f64>,
    pub degenerate_steps: &'a [u64],
    pub divergence: Option<String>,
}

/// Result of one solve, written or not.
pub struct Execution {
    pub exit: Exit,
    pub method: Method,
    pub triga: Option<TrigaResolution>,
    pub trace: Trace,
    pub divergence: Option<String>,
}

impl Execution {
    pub fn status(&self) -> &'static str {
        match (self.divergence.is_some(), self.trace.status) {
            (true, _) => "diverged",
            (false, Status::Converged) => "converged",
            (false, Status::IterationCap) => "iteration_cap",
        }
    }
}

pub fn execute(
    loaded: &LoadedProblem,
    kind: MethodKind,
    schedule: TikhonovSchedule,
    settings: &SolveSettings,
    iterates: Option<(u64, u64)>,
) -> CliResult<Execution> {
    let resolved = resolve_method(kind, schedule, loaded.problem.lipschitz(), settings)?;
    let options = RunOptions {
        stop: settings.stop,
        stride: settings.stride,
        reference_value: loaded.reference_value,
        x_star: None,
        iterate_window: iterates,
    };
    let init = (loaded.start.clone(), loaded.start.clone());
    let (trace, divergence) = match run(&loaded.problem, &resolved.method, init, &options) {
        Ok(trace) => (trace, None),
        Err(RunError::Diverged { error, trace }) => (*trace, Some(error.to_string())),
        Err(RunError::Invalid(e)) => return Err(CliError::config(e.to_string())),
    };
    let exit = match (&divergence, trace.status) {
        (Some(_), _) => Exit::Divergence,
        (None, Status::Converged) => Exit::Ok,
        (None, Status::IterationCap) => Exit::IterationCap,
    };
    Ok(Execution {
        exit,
        method: resolved.method,
        triga: resolved.triga,
        trace,
        divergence,
    })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Writes `trace.csv`, `meta.json` and, when kept, `iterates.csv` into `dir`.
pub fn write_outputs(dir: &Path, config: &RunConfig, loaded: &LoadedProblem, exec: &Execution) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("trace.csv");
    exec.trace
        .write_csv(create(&path)?)
        .map_err(|e| CliError::io(&path, e))?;
    if !exec.trace.iterates.is_empty() {
        let path = dir.join("iterates.csv");
        exec.trace
            .write_iterates_csv(create(&path)?)
            .map_err(|e| CliError::io(&path, e))?;
    }
    let last = exec.trace.last();
    let meta = RunMeta {
        config,
        problem_uri: &loaded.uri,
        seed: config.settings.seed,
        generator: GENERATOR,
        dimension: loaded.problem.dimension(),
        lipschitz: loaded.problem.lipschitz(),
        step_size: exec.method.step_size(),
        method: &exec.method,
        triga: exec.triga.as_ref(),
        status: exec.status(),
        final_k: exec.trace.final_k(),
        final_grad_norm: last.map(|r| r.grad_norm),
        final_f_gap: last.map(|r| r.f_gap),
        wall_time: exec.trace.final_wall_time(),
        reference_value: exec.trace.reference_value,
        degenerate_steps: &exec.trace.degenerate_steps,
        divergence: exec.divergence.clone(),
    };
    let path = dir.join("meta.json");
    serde_json::to_writer_pretty(create(&path)?, &meta)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn cmd_run(config: &RunConfig) -> CliResult<Exit> {
    config.validate()?;
    let loaded = load_problem(&config.problem, &config.settings)?;
    let exec = execute(
        &loaded,
        config.method,
        config.schedule,
        &config.settings,
        config.iterates,
    )?;
    write_outputs(&config.output, config, &loaded, &exec)?;
    match &exec.divergence {
        Some(msg) => eprintln!("{msg}"),
        None => println!(
            "{} {} after k = {} (grad norm {:.3e})",
            exec.method.name(),
            exec.status(),
            exec.trace.final_k(),
            exec.trace.last().map_or(f64::NAN, |r| r.grad_norm)
        ),
    }
    Ok(exec.exit)
}
