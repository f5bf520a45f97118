use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::Serialize;

use triga::diagnostics::{audit_theorem1, check_viscosity_lemmas, AuditReport, Violation};
use triga::problems::ProblemSpec;
use triga::solvers::{read_iterates_csv, read_trace_csv, Method, Status, Trace};

use crate::config::load_run_config;
use crate::exit::{CliError, CliResult, Exit};
use crate::resolve::load_problem;

/// Default audit length past `k₀`.
pub const DEFAULT_AUDIT_SPAN: u64 = 500;

#[derive(Debug, Serialize)]
pub struct DiagnoseReport {
    pub window: (u64, u64),
    pub passed: bool,
    pub audit_violations: usize,
    pub pre_regime: usize,
    pub viscosity_violations: Vec<Violation>,
    pub audit: AuditReport,
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

/// Audits a recorded TRIGA run in `dir` over `window` (default `[k₀, k₀+500]`).
pub fn diagnose(dir: &Path, window: Option<(u64, u64)>) -> CliResult<DiagnoseReport> {
    let meta_path = dir.join("meta.json");
    let config = load_run_config(&meta_path)?;
    let meta: serde_json::Value = serde_json::from_reader(open(&meta_path)?)
        .map_err(|e| CliError::config(format!("{}: {e}", meta_path.display())))?;
    let method: Method = serde_json::from_value(meta["method"].clone())
        .map_err(|e| CliError::config(format!("{}: field `method`: {e}", meta_path.display())))?;
    let Method::Triga { schedule, params } = method else {
        return Err(CliError::config(format!(
            "diagnostics audit TRIGA runs, found {}",
            method.name()
        )));
    };
    if let Ok(ProblemSpec::Libsvm { .. }) = config.problem.parse::<ProblemSpec>() {
        return Err(CliError::config(
            "x* unavailable: logistic problems have no closed-form minimum-norm solution",
        ));
    }
    let loaded = load_problem(&config.problem, &config.settings)?;
    if loaded.problem.min_norm_solution().is_err() {
        return Err(CliError::config("x* unavailable for this problem"));
    }

    let records = read_trace_csv(open(&dir.join("trace.csv"))?)?;
    let final_k = records.last().map_or(0, |r| r.k);
    let (lo, hi) = match window {
        Some(w) => w,
        None => {
            let lo = params.k0.unwrap_or(2).max(2);
            (lo, (lo + DEFAULT_AUDIT_SPAN).min(final_k.saturating_sub(1)))
        }
    };
    if lo < 2 || hi < lo || hi + 1 > final_k {
        return Err(CliError::config(format!(
            "window [{lo}, {hi}] must satisfy 2 ≤ lo ≤ hi < {final_k} (the last recorded k)"
        )));
    }
    let iterates_path = dir.join("iterates.csv");
    let iterates = if iterates_path.exists() {
        read_iterates_csv(open(&iterates_path)?)?
    } else {
        Vec::new()
    };
    let needed = lo - 1..=hi + 1;
    let has_record = |k: u64| records.binary_search_by_key(&k, |r| r.k).is_ok();
    let has_iterate = |k: u64| iterates.binary_search_by_key(&k, |(i, _)| *i).is_ok();
    if let Some(k) = needed.clone().find(|&k| !has_record(k) || !has_iterate(k)) {
        return Err(CliError::new(
            Exit::Stride,
            format!(
                "k = {k} was not recorded; rerun with `stride = 1` and `iterates = {}:{}` to audit [{lo}, {hi}]",
                lo - 1,
                hi + 1
            ),
        ));
    }

    let trace = Trace {
        method: "triga".into(),
        status: if meta["status"] == "converged" {
            Status::Converged
        } else {
            Status::IterationCap
        },
        stride: config.settings.stride,
        gradient_tolerance: config.settings.stop.gradient_tolerance,
        reference_value: loaded.reference_value,
        degenerate_steps: Vec::new(),
        records,
        iterates,
    };
    let audit = audit_theorem1(&trace, (lo, hi), &loaded.problem, &schedule, &params)?;
    let viscosity_violations = check_viscosity_lemmas(&loaded.problem, &schedule, lo..=hi)?;
    let audit_violations = audit.violations().len();
    Ok(DiagnoseReport {
        window: (lo, hi),
        passed: audit_violations == 0 && viscosity_violations.is_empty(),
        audit_violations,
        pre_regime: audit.pre_regime_count(),
        viscosity_violations,
        audit,
    })
}

pub fn cmd_diagnose(dir: &Path, window: Option<(u64, u64)>) -> CliResult<Exit> {
    let report = diagnose(dir, window)?;
    let path = dir.join("audit.json");
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &report)
        .map_err(|e| CliError::config(e.to_string()))?;
    println!(
        "window [{}, {}]: {} audit violations, {} viscosity violations, {} pre-regime entries",
        report.window.0,
        report.window.1,
        report.audit_violations,
        report.viscosity_violations.len(),
        report.pre_regime
    );
    for e in report.audit.violations().iter().take(10) {
        println!("  k = {}: margin {:e} {:?}", e.k, e.margin, e.bound_failures);
    }
    Ok(if report.passed { Exit::Ok } else { Exit::AuditViolations })
}
