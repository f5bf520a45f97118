use std::path::Path;

use serde::Serialize;

use triga::schedules::{
    check_k1, critical_c_bound, default_delta, default_q, find_k0, select_parameters, select_parameters_in_row,
    Certificate, K1Report, Selection, SolverParameters, TableRow, TikhonovSchedule,
};

use crate::config::RunConfig;
use crate::exit::{CliError, CliResult, Exit};
use crate::resolve::load_problem;

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub lipschitz: f64,
    pub schedule: TikhonovSchedule,
    pub selection: Option<Selection>,
    pub parameters: Option<SolverParameters>,
    pub k1: Option<K1Report>,
    pub certificate: Option<Certificate>,
    pub horizon: u64,
    pub critical_c_min: Option<f64>,
    /// Name and detail of the first failed requirement.
    pub failure: Option<String>,
}

impl CheckReport {
    pub fn certified(&self) -> bool {
        self.failure.is_none()
    }
}

/// Selection, (K1) and (K0) certification without running a solver.
pub fn certify(config: &RunConfig) -> CliResult<CheckReport> {
    let settings = &config.settings;
    let lipschitz = match (settings.lipschitz, config.problem.is_empty()) {
        (Some(l), _) => l,
        (None, false) => load_problem(&config.problem, settings)?.problem.lipschitz(),
        (None, true) => return Err(CliError::config("give `lipschitz` or `problem`")),
    };
    let schedule = config.schedule;
    let s = settings.step.step(lipschitz);
    let mut report = CheckReport {
        lipschitz,
        schedule,
        selection: None,
        parameters: None,
        k1: None,
        certificate: None,
        horizon: settings.horizon,
        critical_c_min: None,
        failure: None,
    };
    let delta = settings.delta.unwrap_or_else(|| default_delta(schedule.exponent(), s));
    let q = match settings.q {
        Some(q) => q,
        None => match default_q(lipschitz, s) {
            Ok(q) => q,
            Err(e) => {
                report.failure = Some(format!("K1(iv): {e}"));
                return Ok(report);
            }
        },
    };
    let selection = match settings.row {
        Some(row) => select_parameters_in_row(TableRow::new(row)?, delta, q, lipschitz),
        None => select_parameters(delta, q, lipschitz),
    };
    let selection = match selection {
        Ok(sel) => sel,
        Err(e) => {
            report.failure = Some(e.to_string());
            return Ok(report);
        }
    };
    report.selection = Some(selection);
    // attach s even past the (K1)(iv) bound so the slack can be reported
    let mut params = SolverParameters {
        s,
        delta: selection.delta,
        lambda: selection.lambda,
        q: selection.q,
        a: selection.a,
        b: selection.b,
        k0: None,
    };
    let k1 = check_k1(&params, lipschitz);
    if let Some(c) = k1.first_failure() {
        report.failure = Some(format!("{} violated (slack {:e})", c.name, c.slack));
    }
    report.k1 = Some(k1);
    if report.failure.is_none() {
        if let TikhonovSchedule::Critical { c } = schedule {
            match critical_c_bound(&params) {
                Ok(c_min) => {
                    report.critical_c_min = Some(c_min);
                    if c <= c_min {
                        report.failure = Some(format!("critical c bound: c = {c} must exceed c_min = {c_min}"));
                    }
                }
                Err(e) => report.failure = Some(format!("critical c bound: {e}")),
            }
        }
    }
    if report.failure.is_none() {
        match find_k0(&params, &schedule, lipschitz, settings.horizon) {
            Ok(cert) => {
                params.k0 = Some(cert.k0);
                report.certificate = Some(cert);
            }
            Err(e) => report.failure = Some(e.to_string()),
        }
    }
    report.parameters = Some(params);
    Ok(report)
}

pub fn print_report(r: &CheckReport) {
    println!("L = {}", r.lipschitz);
    println!("schedule = {}", r.schedule);
    if let Some(sel) = &r.selection {
        println!(
            "row {}: delta = {}, q = {}, a = {}, b = {}, lambda = {}",
            sel.row.number(),
            sel.delta,
            sel.q,
            sel.a,
            sel.b,
            sel.lambda
        );
        println!("step bound s < {}", sel.step_bound);
    }
    if let Some(p) = &r.parameters {
        println!("s = {}", p.s);
    }
    if let Some(k1) = &r.k1 {
        for c in &k1.conditions {
            println!(
                "{:8} slack {:+.6e} {}",
                c.name,
                c.slack,
                if c.holds { "ok" } else { "FAILED" }
            );
        }
    }
    if let Some(c_min) = r.critical_c_min {
        println!("critical c_min = {c_min}");
    }
    match (&r.certificate, &r.failure) {
        (Some(cert), None) => println!(
            "k0 = {} (verified up to {}, {} indices, monotone tail: {})",
            cert.k0, cert.verified_up_to, cert.checked_indices, cert.monotone_tail
        ),
        (_, Some(f)) => println!("not certified: {f}"),
        (None, None) => {}
    }
}

pub fn cmd_check_params(config: &RunConfig, report_path: Option<&Path>) -> CliResult<Exit> {
    let report = certify(config)?;
    print_report(&report);
    if let Some(path) = report_path {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        serde_json::to_writer_pretty(file, &report).map_err(|e| CliError::config(e.to_string()))?;
    }
    match &report.failure {
        None => Ok(Exit::Ok),
        Some(f) => Err(CliError::new(Exit::Certification, f.clone())),
    }
}
