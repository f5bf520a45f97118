use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use triga::metrics::{summarize_comparison, Comparison, Outcome};
use triga::schedules::TikhonovSchedule;
use triga::solvers::{fmt_f64, Trace};

use crate::config::{MethodKind, RunConfig, SweepConfig};
use crate::exit::{CliError, CliResult, Exit};
use crate::resolve::{load_problem, LoadedProblem};

use super::run::{execute, write_outputs};

/// Environment variable holding the sweep worker count.
pub const WORKERS_ENV: &str = "TRIGA_WORKERS";

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub problem: String,
    pub solver: String,
    /// `converged`, `iteration_cap`, `diverged`, `certification-skipped` or `error`.
    pub status: String,
    pub iterations: Option<u64>,
    pub wall_time: Option<f64>,
    pub f_gap: Option<f64>,
    pub grad_norm: Option<f64>,
    pub k0: Option<u64>,
    pub note: Option<String>,
}

pub struct SweepOutcome {
    pub cells: Vec<CellSummary>,
    pub comparisons: Vec<Comparison>,
    pub output: PathBuf,
}

impl SweepOutcome {
    pub fn succeeded(&self) -> usize {
        self.cells.iter().filter(|c| c.status == "converged").count()
    }

    pub fn exit(&self) -> Exit {
        let any = |s: &str| self.cells.iter().any(|c| c.status == s);
        if self.succeeded() > 0 {
            Exit::Ok
        } else if any("iteration_cap") {
            Exit::IterationCap
        } else if any("certification-skipped") {
            Exit::Certification
        } else if any("diverged") {
            Exit::Divergence
        } else {
            Exit::Config
        }
    }
}

struct Cell {
    problem: usize,
    method: MethodKind,
    p: Option<f64>,
}

impl Cell {
    fn solver(&self) -> String {
        match self.p {
            Some(p) => format!("{}_p{p}", self.method.as_str()),
            None => self.method.as_str().to_owned(),
        }
    }
}

fn label(index: usize, uri: &str) -> String {
    let tail: String = uri
        .rsplit('/')
        .next()
        .unwrap_or(uri)
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '=' {
                c
            } else {
                '_'
            }
        })
        .take(48)
        .collect();
    let scheme = uri.split(':').next().unwrap_or("");
    if tail.starts_with(scheme) {
        format!("{index:02}_{tail}")
    } else {
        format!("{index:02}_{scheme}_{tail}")
    }
}

fn worker_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::config(format!("{WORKERS_ENV} must be a positive integer, found {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::config(e.to_string()))
}

struct CellResult {
    summary: CellSummary,
    trace: Option<Trace>,
}

fn run_cell(
    cell: &Cell,
    name: &str,
    loaded: &CliResult<LoadedProblem>,
    config: &SweepConfig,
    dir: &Path,
) -> CellResult {
    let mut summary = CellSummary {
        problem: name.to_owned(),
        solver: cell.solver(),
        status: "error".into(),
        iterations: None,
        wall_time: None,
        f_gap: None,
        grad_norm: None,
        k0: None,
        note: None,
    };
    let loaded = match loaded {
        Ok(l) => l,
        Err(e) => {
            summary.note = Some(e.message.clone());
            return CellResult { summary, trace: None };
        }
    };
    let schedule = match cell.p.map(TikhonovSchedule::power).transpose() {
        Ok(s) => s.unwrap_or(TikhonovSchedule::Power { p: 1.0 }),
        Err(e) => {
            summary.note = Some(e.to_string());
            return CellResult { summary, trace: None };
        }
    };
    let exec = match execute(loaded, cell.method, schedule, &config.settings, None) {
        Ok(exec) => exec,
        Err(e) => {
            if e.exit == Exit::Certification {
                summary.status = "certification-skipped".into();
            }
            summary.note = Some(e.message);
            return CellResult { summary, trace: None };
        }
    };
    let run_config = RunConfig {
        problem: loaded.uri.clone(),
        method: cell.method,
        schedule,
        settings: config.settings.clone(),
        output: dir.to_owned(),
        iterates: None,
    };
    if let Err(e) = write_outputs(dir, &run_config, loaded, &exec) {
        summary.note = Some(e.message);
        return CellResult { summary, trace: None };
    }
    summary.status = exec.status().into();
    summary.k0 = exec.triga.as_ref().and_then(|t| t.certificate.as_ref()).map(|c| c.k0);
    summary.note = exec
        .divergence
        .clone()
        .or_else(|| exec.triga.as_ref().and_then(|t| t.certification_error.clone()));
    if let Some(last) = exec.trace.last() {
        summary.iterations = Some(last.k);
        summary.wall_time = Some(last.wall_time);
        summary.f_gap = Some(last.f_gap);
        summary.grad_norm = Some(last.grad_norm);
    }
    let trace = exec.divergence.is_none().then_some(exec.trace);
    CellResult { summary, trace }
}

fn write_summary(path: &Path, cells: &[CellSummary]) -> CliResult<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| CliError::io(path, e))?);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let result: std::io::Result<()> = (|| {
        writeln!(out, "problem,solver,status,iterations,wall_time,f_gap,grad_norm,k0")?;
        for c in cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.problem,
                c.solver,
                c.status,
                c.iterations.map(|k| k.to_string()).unwrap_or_default(),
                opt(c.wall_time),
                opt(c.f_gap),
                opt(c.grad_norm),
                c.k0.map(|k| k.to_string()).unwrap_or_default()
            )?;
        }
        Ok(())
    })();
    result.map_err(|e| CliError::io(path, e))
}

/// Runs every method × problem × p cell, then writes costs, profiles and a summary.
pub fn sweep(config: &SweepConfig) -> CliResult<SweepOutcome> {
    config.validate()?;
    let pool = worker_pool()?;
    let out = config.output.clone();
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;

    let names: Vec<String> = config.problems.iter().enumerate().map(|(i, u)| label(i, u)).collect();
    let loaded: Vec<CliResult<LoadedProblem>> = pool.install(|| {
        config
            .problems
            .par_iter()
            .map(|uri| load_problem(uri, &config.settings))
            .collect()
    });

    let mut cells = Vec::new();
    for problem in 0..config.problems.len() {
        for &method in &config.methods {
            match method {
                MethodKind::Nag => cells.push(Cell {
                    problem,
                    method,
                    p: None,
                }),
                _ => cells.extend(config.p_values.iter().map(|&p| Cell {
                    problem,
                    method,
                    p: Some(p),
                })),
            }
        }
    }

    let results: Vec<CellResult> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let name = &names[cell.problem];
                let dir = out.join("cells").join(name).join(cell.solver());
                let r = run_cell(cell, name, &loaded[cell.problem], config, &dir);
                log::info!("{name} / {}: {}", r.summary.solver, r.summary.status);
                r
            })
            .collect()
    });

    let summaries: Vec<CellSummary> = results.iter().map(|r| r.summary.clone()).collect();
    write_summary(&out.join("summary.csv"), &summaries)?;

    let outcomes: Vec<Outcome> = results
        .iter()
        .map(|r| Outcome {
            solver: &r.summary.solver,
            problem: &r.summary.problem,
            trace: r.trace.as_ref(),
        })
        .collect();
    let mut comparisons = Vec::new();
    for &criterion in &config.criteria {
        match summarize_comparison(&outcomes, criterion) {
            Ok(cmp) => {
                let costs = out.join(format!("costs_{}.csv", criterion.as_str()));
                let file = std::fs::File::create(&costs).map_err(|e| CliError::io(&costs, e))?;
                cmp.costs
                    .write_csv(std::io::BufWriter::new(file))
                    .map_err(|e| CliError::io(&costs, e))?;
                let prof = out.join(format!("profile_{}.csv", criterion.as_str()));
                let file = std::fs::File::create(&prof).map_err(|e| CliError::io(&prof, e))?;
                cmp.profile
                    .write_csv(std::io::BufWriter::new(file))
                    .map_err(|e| CliError::io(&prof, e))?;
                comparisons.push(cmp);
            }
            Err(e) => log::warn!("no {} profile: {e}", criterion.as_str()),
        }
    }
    Ok(SweepOutcome {
        cells: summaries,
        comparisons,
        output: out,
    })
}

pub fn cmd_sweep(config: &SweepConfig) -> CliResult<Exit> {
    let outcome = sweep(config)?;
    println!(
        "{} cells, {} converged; results in {}",
        outcome.cells.len(),
        outcome.succeeded(),
        outcome.output.display()
    );
    for cmp in &outcome.comparisons {
        println!("{}:", cmp.criterion.as_str());
        for (s, name) in cmp.profile.solvers.iter().enumerate() {
            println!(
                "  {name}: ratio 1 on {} of {}",
                cmp.profile.wins(s),
                cmp.profile.problems.len()
            );
        }
    }
    Ok(outcome.exit())
}
