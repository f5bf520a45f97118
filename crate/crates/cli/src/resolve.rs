use nalgebra::DVector;
use serde::Serialize;

use triga::problems::{Family, ProblemSpec};
use triga::rng::default_start;
use triga::schedules::{
    critical_c_bound, default_delta, default_q, find_k0, select_parameters, select_parameters_in_row, Certificate,
    Selection, TableRow, TikhonovSchedule,
};
use triga::solvers::{reference_optimum, Method, NadtrSettings};
use triga::Problem;

use crate::config::{MethodKind, SolveSettings};
use crate::exit::{CliError, CliResult, Exit};

/// Gradient tolerance of the overconverged reference run for logistic problems.
pub const REFERENCE_TOLERANCE: f64 = 1e-10;
const REFERENCE_BUDGET: u64 = 1_000_000;

pub struct LoadedProblem {
    pub uri: String,
    pub problem: Problem,
    pub start: DVector<f64>,
    pub reference_value: Option<f64>,
}

pub fn load_problem(uri: &str, settings: &SolveSettings) -> CliResult<LoadedProblem> {
    let spec: ProblemSpec = uri
        .parse()
        .map_err(|e: triga::Error| CliError::config(format!("field `problem`: {e}")))?;
    let mut problem = spec
        .build(settings.seed)
        .map_err(|e| CliError::config(format!("field `problem`: {e}")))?;
    if let Some(l) = settings.lipschitz {
        problem = problem.with_lipschitz(l);
    }
    if !(problem.lipschitz() > 0.0) {
        return Err(CliError::config(format!(
            "problem {uri} has a zero gradient everywhere"
        )));
    }
    let start = default_start(settings.seed, problem.dimension());
    let reference_value = match problem.family() {
        Family::Logistic => {
            let r = reference_optimum(&problem, &start, REFERENCE_TOLERANCE, REFERENCE_BUDGET);
            log::info!(
                "reference value {} for {uri} (gradient norm {:e} after {} iterations)",
                r.value,
                r.grad_norm,
                r.iterations
            );
            Some(r.value)
        }
        _ => problem.optimum_value(),
    };
    Ok(LoadedProblem {
        uri: uri.to_owned(),
        problem,
        start,
        reference_value,
    })
}

/// Outcome of parameter selection and certification for a TRIGA run.
#[derive(Debug, Clone, Serialize)]
pub struct TrigaResolution {
    pub selection: Selection,
    pub certificate: Option<Certificate>,
    pub certification_error: Option<String>,
    /// `c_min` for critical schedules.
    pub critical_c_min: Option<f64>,
}

pub struct ResolvedMethod {
    pub method: Method,
    pub triga: Option<TrigaResolution>,
}

/// Selects and certifies TRIGA parameters. Selection failures are errors;
/// certification failures are errors only under `require_certificate`.
pub fn resolve_triga(
    schedule: TikhonovSchedule,
    lipschitz: f64,
    settings: &SolveSettings,
) -> CliResult<(Method, TrigaResolution)> {
    let s = settings.step.step(lipschitz);
    let delta = settings.delta.unwrap_or_else(|| default_delta(schedule.exponent(), s));
    let q = match settings.q {
        Some(q) => q,
        None => default_q(lipschitz, s).map_err(|e| CliError::new(Exit::Certification, format!("K1(iv): {e}")))?,
    };
    let selection = match settings.row {
        Some(row) => select_parameters_in_row(TableRow::new(row)?, delta, q, lipschitz)?,
        None => select_parameters(delta, q, lipschitz)?,
    };
    let mut params = selection.parameters(s)?;

    let mut failure = None;
    let mut critical_c_min = None;
    if let TikhonovSchedule::Critical { c } = schedule {
        match critical_c_bound(&params) {
            Ok(c_min) => {
                critical_c_min = Some(c_min);
                if c <= c_min {
                    failure = Some(format!("critical c bound: c = {c} must exceed c_min = {c_min}"));
                }
            }
            Err(e) => failure = Some(format!("critical c bound: {e}")),
        }
    }
    let certificate = if failure.is_none() {
        match find_k0(&params, &schedule, lipschitz, settings.horizon) {
            Ok(cert) => Some(cert),
            Err(e) => {
                failure = Some(e.to_string());
                None
            }
        }
    } else {
        None
    };
    if let Some(msg) = &failure {
        if settings.require_certificate {
            return Err(CliError::new(Exit::Certification, msg.clone()));
        }
        log::warn!("running uncertified: {msg}");
    }
    params.k0 = certificate.as_ref().map(|c| c.k0);
    Ok((
        Method::Triga { schedule, params },
        TrigaResolution {
            selection,
            certificate,
            certification_error: failure,
            critical_c_min,
        },
    ))
}

pub fn resolve_method(
    kind: MethodKind,
    schedule: TikhonovSchedule,
    lipschitz: f64,
    settings: &SolveSettings,
) -> CliResult<ResolvedMethod> {
    let s = settings.step.step(lipschitz);
    Ok(match kind {
        MethodKind::Triga => {
            let (method, resolution) = resolve_triga(schedule, lipschitz, settings)?;
            ResolvedMethod {
                method,
                triga: Some(resolution),
            }
        }
        MethodKind::Nag => ResolvedMethod {
            method: Method::Nag {
                s,
                alpha: settings.alpha,
            },
            triga: None,
        },
        MethodKind::Nadtr => {
            let mut cfg = NadtrSettings::new(s, schedule.exponent());
            cfg.a = settings.nadtr.a;
            cfg.c = settings.nadtr.c;
            cfg.q_exp = settings.nadtr.q_exp;
            ResolvedMethod {
                method: Method::Nadtr(cfg),
                triga: None,
            }
        }
    })
}
