//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{dvector, DVector};

use triga::diagnostics::{audit_theorem1, check_descent_lemmas, check_viscosity_lemmas};
use triga::linalg::DesignMatrix;
use triga::metrics::{fit_series, performance_profile, CostMatrix, Criterion, Series};
use triga::problems::{load_libsvm, parse_problem_uri, LeastSquares, QuadraticCoupling};
use triga::rng::{default_start, gaussian_matrix, gaussian_vector, problem_rng};
use triga::schedules::{
    check_k1, critical_c_bound, default_delta, default_q, find_k0, select_parameters, select_parameters_in_row,
    SolverParameters, TableRow, TikhonovSchedule,
};
use triga::solvers::{run, Method, RunOptions, StoppingCriteria, Trace};
use triga::Problem;

use triga_cli::commands::sweep;
use triga_cli::config::{MethodKind, SweepConfig};

type Verdict = Result<String, String>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn quad10() -> Problem {
    QuadraticCoupling::new(10).into()
}

/// Table selection with the default δ and q, then a k₀ search.
fn certified(
    problem: &Problem,
    schedule: TikhonovSchedule,
    p_for_delta: f64,
    frac: f64,
) -> Result<SolverParameters, String> {
    let l = problem.lipschitz();
    let s = 1.0 / (frac * l);
    let q = default_q(l, s).map_err(|e| e.to_string())?;
    let mut params = select_parameters(default_delta(p_for_delta, s), q, l)
        .and_then(|sel| sel.parameters(s))
        .map_err(|e| e.to_string())?;
    params.k0 = Some(find_k0(&params, &schedule, l, 1_000_000).map_err(|e| e.to_string())?.k0);
    Ok(params)
}

fn solve(problem: &Problem, method: &Method, start: DVector<f64>, options: &RunOptions) -> Result<Trace, String> {
    run(problem, method, (start.clone(), start), options).map_err(|e| e.to_string())
}

fn budget(n: u64) -> RunOptions {
    RunOptions {
        stop: StoppingCriteria::fixed_budget(n),
        ..Default::default()
    }
}

fn slope(trace: &Trace, series: Series) -> Result<f64, String> {
    fit_series(&trace.records, series, 100, 10_000)
        .map(|f| f.slope)
        .map_err(|e| e.to_string())
}

/// Value and velocity rates for power schedules.
fn rates() -> (Verdict, Verdict) {
    let problem = quad10();
    let mut values = Vec::new();
    let mut velocities = Vec::new();
    let (mut ok1, mut ok3) = (true, true);
    for p in [0.6, 1.0, 1.5] {
        let clock = Instant::now();
        let schedule = TikhonovSchedule::power(p).unwrap();
        let outcome = certified(&problem, schedule, p, 1.1).and_then(|params| {
            let trace = solve(
                &problem,
                &Method::Triga { schedule, params },
                default_start(0, problem.dimension()),
                &budget(10_000),
            )?;
            Ok((
                params.k0.unwrap(),
                slope(&trace, Series::FGap)?,
                slope(&trace, Series::Velocity)?,
            ))
        });
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok((k0, value, velocity)) => {
                ok1 &= value <= -p + 0.15 && secs <= 5.0;
                ok3 &= velocity <= -(2.0 + p) / 4.0 + 0.15;
                values.push(format!(
                    "p={p}: slope {value:.3} ≤ {:.2} (k0={k0}, {secs:.2}s)",
                    -p + 0.15
                ));
                velocities.push(format!("p={p}: slope {velocity:.3} ≤ {:.3}", -(2.0 + p) / 4.0 + 0.15));
            }
            Err(e) => {
                ok1 = false;
                ok3 = false;
                values.push(format!("p={p}: {e}"));
                velocities.push(format!("p={p}: {e}"));
            }
        }
    }
    (check(ok1, values.join("; ")), check(ok3, velocities.join("; ")))
}

fn critical_rate() -> Verdict {
    let clock = Instant::now();
    let problem = quad10();
    let l = problem.lipschitz();
    let s = 1.0 / (1.1 * l);
    let params = select_parameters(default_delta(2.0, s), default_q(l, s).map_err(|e| e.to_string())?, l)
        .and_then(|sel| sel.parameters(s))
        .map_err(|e| e.to_string())?;
    let c_min = critical_c_bound(&params).map_err(|e| e.to_string())?;
    let schedule = TikhonovSchedule::critical(2.0 * c_min).map_err(|e| e.to_string())?;
    let trace = solve(
        &problem,
        &Method::Triga { schedule, params },
        default_start(0, problem.dimension()),
        &budget(10_000),
    )?;
    let value = slope(&trace, Series::FGap)?;
    let velocity = slope(&trace, Series::Velocity)?;
    let secs = clock.elapsed().as_secs_f64();
    check(
        value <= -1.8 && velocity <= -0.8 && secs <= 5.0,
        format!(
            "c = 2·c_min = {:.4}: value slope {value:.3} ≤ -1.8, velocity slope {velocity:.3} ≤ -0.8 ({secs:.2}s)",
            2.0 * c_min
        ),
    )
}

fn read_calibration() -> Result<[f64; 3], String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/min_norm_calibration.csv");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = [f64::NAN; 3];
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let (name, value) = line.split_once(',').ok_or("malformed calibration row")?;
        let slot = match name {
            "nag_final_distance" => 0,
            "triga_distance_k100" => 1,
            "triga_distance_k10000" => 2,
            other => return Err(format!("unknown calibration quantity {other}")),
        };
        out[slot] = value.parse().map_err(|_| format!("bad calibration value {value}"))?;
    }
    Ok(out)
}

fn min_norm_selection() -> Verdict {
    let problem: Problem = QuadraticCoupling::new(1).into();
    let l = problem.lipschitz();
    let s = 1.0 / (1.1 * l);
    let start = dvector![2.0, -1.0];
    let nag = solve(
        &problem,
        &Method::Nag { s, alpha: 3.0 },
        start.clone(),
        &RunOptions::default(),
    )?;
    let nag_dist = nag.last().and_then(|r| r.dist_to_xstar).ok_or("no NAG distance")?;

    let schedule = TikhonovSchedule::power(1.95).unwrap();
    let params = select_parameters(default_delta(1.95, s), default_q(l, s).map_err(|e| e.to_string())?, l)
        .and_then(|sel| sel.parameters(s))
        .map_err(|e| e.to_string())?;
    let trace = solve(&problem, &Method::Triga { schedule, params }, start, &budget(10_000))?;
    let dist = |k| trace.record_at(k).and_then(|r| r.dist_to_xstar).unwrap_or(f64::NAN);
    let (d100, d10k) = (dist(100), dist(10_000));

    let calibration = read_calibration()?;
    let reproduced = [nag_dist, d100, d10k]
        .iter()
        .zip(calibration)
        .all(|(now, then)| (now - then).abs() <= 1e-9 * then.abs());
    check(
        nag.converged() && nag_dist >= 0.1 && d10k <= 0.25 * nag_dist && d10k <= 0.5 * d100 && reproduced,
        format!(
            "NAG stops at k={} with distance {nag_dist:.4}; TRIGA distance {d100:.4} at k=100, {d10k:.3e} at k=10^4; calibration reproduced: {reproduced}",
            nag.final_k()
        ),
    )
}

/// Rank-deficient 20×30 least squares rescaled so that σ_max(A) = 1.
fn normalized_least_squares() -> Result<Problem, String> {
    let Problem::LeastSquares(ls) = parse_problem_uri("gaussian:m=20,n=30,rank=10", 0).map_err(|e| e.to_string())?
    else {
        return Err("gaussian URI did not build least squares".into());
    };
    let a = match ls.matrix() {
        DesignMatrix::Dense(a) => a.clone(),
        DesignMatrix::Sparse(a) => a.to_dense(),
    };
    let sigma = a.clone().svd(false, false).singular_values.max();
    LeastSquares::new(DesignMatrix::Dense(a / sigma), ls.rhs() / sigma)
        .map(Problem::from)
        .map_err(|e| e.to_string())
}

fn lyapunov_audit() -> Verdict {
    let clock = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, problem) in [
        ("quadratic:n=10", quad10()),
        ("least squares 20×30 rank 10", normalized_least_squares()?),
    ] {
        let p = 1.5;
        let schedule = TikhonovSchedule::power(p).unwrap();
        let params = certified(&problem, schedule, p, 2.1)?;
        let k0 = params.k0.unwrap();
        let window = (k0, k0 + 500);
        let options = RunOptions {
            stop: StoppingCriteria::fixed_budget(window.1 + 1),
            iterate_window: Some((window.0 - 1, window.1 + 1)),
            ..Default::default()
        };
        let trace = solve(
            &problem,
            &Method::Triga { schedule, params },
            default_start(0, problem.dimension()),
            &options,
        )?;
        let report = audit_theorem1(&trace, window, &problem, &schedule, &params).map_err(|e| e.to_string())?;
        let violations = report.violations().len();
        ok &= violations == 0 && report.entries.len() == 501;
        lines.push(format!(
            "{name}: {violations} violations over [{}, {}]",
            window.0, window.1
        ));
    }
    let secs = clock.elapsed().as_secs_f64();
    check(ok && secs <= 10.0, format!("{} ({secs:.2}s)", lines.join("; ")))
}

fn viscosity_lemmas() -> Verdict {
    let families: [(&str, Problem); 2] = [
        ("quadratic", QuadraticCoupling::new(5).into()),
        (
            "least squares",
            parse_problem_uri("gaussian:m=20,n=30,rank=10", 0).map_err(|e| e.to_string())?,
        ),
    ];
    let mut total = 0;
    for (name, problem) in &families {
        for p in [0.5, 1.0, 1.95] {
            let schedule = TikhonovSchedule::power(p).unwrap();
            let v = check_viscosity_lemmas(problem, &schedule, 1..=200).map_err(|e| format!("{name} p={p}: {e}"))?;
            total += v.len();
        }
    }
    check(
        total == 0,
        format!("{total} violations over 2 families × p ∈ {{0.5, 1, 1.95}} × k ∈ [1, 200]"),
    )
}

fn parameter_certification() -> Verdict {
    let mut certified_cells = 0;
    let mut failures = Vec::new();
    let mut rows_seen = std::collections::BTreeSet::new();
    for p in [0.6, 1.95] {
        let s: f64 = if p < 1.0 { 0.01 } else { 1000.0 };
        let schedule = TikhonovSchedule::power(p).unwrap();
        for delta in [1.0, 3.0] {
            for q in [0.5, 1.0, 2.0] {
                let l = q / ((q + 1.0) * s) / 2.0;
                for row in 1..=6 {
                    let Ok(sel) = select_parameters_in_row(TableRow::new(row).unwrap(), delta, q, l) else {
                        continue;
                    };
                    rows_seen.insert(row);
                    let cell = format!("p={p} δ={delta} q={q} row {row}");
                    let params = match sel.parameters(s) {
                        Ok(params) => params,
                        Err(e) => {
                            failures.push(format!("{cell}: {e}"));
                            continue;
                        }
                    };
                    if !check_k1(&params, l).conditions.iter().all(|c| c.slack < 0.0) {
                        failures.push(format!("{cell}: K1 slack not strictly negative"));
                        continue;
                    }
                    if let Err(e) = find_k0(&params, &schedule, l, 1_000_000) {
                        failures.push(format!("{cell}: {e}"));
                        continue;
                    }
                    let mut tampered = params;
                    tampered.lambda = 1.5 * params.delta;
                    if find_k0(&tampered, &schedule, l, 1_000_000).is_ok() {
                        failures.push(format!("{cell}: λ = 1.5δ still certified"));
                        continue;
                    }
                    certified_cells += 1;
                }
            }
        }
    }
    check(
        failures.is_empty() && rows_seen.len() == 6,
        if failures.is_empty() {
            format!("{certified_cells} cells certified across rows {rows_seen:?}; λ above δ rejected in each")
        } else {
            failures.join("; ")
        },
    )
}

fn descent_lemmas() -> Verdict {
    let families: [(&str, Problem); 3] = [
        ("quadratic", QuadraticCoupling::new(5).into()),
        (
            "least squares",
            parse_problem_uri("gaussian:m=20,n=30,rank=10", 0).map_err(|e| e.to_string())?,
        ),
        (
            "logistic",
            load_libsvm(data("logistic_small.svm"), None)
                .map_err(|e| e.to_string())?
                .into(),
        ),
    ];
    let counts: Vec<String> = families
        .iter()
        .map(|(name, p)| format!("{name}: {}", check_descent_lemmas(p, 1000, 7).len()))
        .collect();
    check(
        counts.iter().all(|c| c.ends_with(": 0")),
        format!("violations per 1000 samples: {}", counts.join(", ")),
    )
}

fn random_costs(seed: u64) -> CostMatrix {
    let mut rng = problem_rng(seed);
    let draw = gaussian_matrix(&mut rng, 3, 6);
    let costs = (0..3)
        .map(|s| {
            (0..6)
                .map(|p| (draw[(s, p)] < 1.5).then(|| draw[(s, p)].exp()))
                .collect()
        })
        .collect();
    let names = |prefix: &str, n: usize| (0..n).map(|i| format!("{prefix}{i}")).collect();
    CostMatrix::new(names("s", 3), names("p", 6), costs).unwrap()
}

fn profile_correctness() -> Verdict {
    let fixture = CostMatrix::new(
        vec!["s1".into(), "s2".into()],
        vec!["p1".into(), "p2".into()],
        vec![vec![Some(1.0), Some(4.0)], vec![Some(2.0), Some(2.0)]],
    )
    .map_err(|e| e.to_string())?;
    let prof = performance_profile(&fixture).map_err(|e| e.to_string())?;
    let exact =
        prof.rho(0, 0.0) == 0.5 && prof.rho(0, 1.0) == 1.0 && prof.rho(1, 0.0) == 0.5 && prof.rho(1, 1.0) == 1.0;

    let mut property_failures = 0;
    for seed in 0..100 {
        let costs = random_costs(seed);
        let Ok(base) = performance_profile(&costs) else {
            continue;
        };
        let mut scaled = costs.clone();
        let factor = gaussian_vector(&mut problem_rng(seed + 1000), 1)[0].exp();
        for row in &mut scaled.costs {
            row[0] = row[0].map(|c| c * factor);
        }
        let scaled = performance_profile(&scaled).map_err(|e| e.to_string())?;
        let probes: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        for s in 0..base.solvers.len() {
            let curve: Vec<f64> = probes.iter().map(|&t| base.rho(s, t)).collect();
            let invariant = probes
                .iter()
                .all(|&t| (base.rho(s, t) - scaled.rho(s, t)).abs() <= 1e-12);
            let monotone = curve.windows(2).all(|w| w[0] <= w[1]);
            let bounded = curve.iter().all(|r| (0.0..=1.0).contains(r));
            if !(invariant && monotone && bounded) {
                property_failures += 1;
            }
        }
    }
    check(
        exact && property_failures == 0,
        format!("2×2 fixture exact: {exact}; property failures over 100 random matrices: {property_failures}"),
    )
}

fn central_difference(problem: &Problem, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let h = 1e-5 * x[i].abs().max(1.0);
        let (mut up, mut down) = (x.clone(), x.clone());
        up[i] += h;
        down[i] -= h;
        (problem.value(&up) - problem.value(&down)) / (2.0 * h)
    })
}

fn gradient_checks() -> Verdict {
    let families: [(&str, Problem); 3] = [
        ("quadratic", QuadraticCoupling::new(5).into()),
        (
            "least squares",
            parse_problem_uri("gaussian:m=20,n=30,rank=10", 0).map_err(|e| e.to_string())?,
        ),
        (
            "logistic",
            load_libsvm(data("logistic_small.svm"), None)
                .map_err(|e| e.to_string())?
                .into(),
        ),
    ];
    let mut rng = problem_rng(2024);
    let mut worst: f64 = 0.0;
    for (_, problem) in &families {
        for _ in 0..12 {
            let x = gaussian_vector(&mut rng, problem.dimension());
            let g = problem.gradient(&x);
            worst = worst.max((&g - central_difference(problem, &x)).norm() / g.norm().max(1e-8));
        }
    }
    check(
        worst <= 1e-6,
        format!("worst relative error {worst:.2e} over 3 families × 12 points"),
    )
}

fn miniature_sweep() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = SweepConfig {
        problems: vec![
            "gaussian:m=20,n=30,rank=10,seed=1".into(),
            "gaussian:m=40,n=20,seed=2".into(),
            "gaussian:m=30,n=30,rank=15,seed=3".into(),
            "quadratic:n=5".into(),
            "quadratic:n=20".into(),
            format!("libsvm:{}", data("logistic_small.svm").display()),
        ],
        methods: vec![MethodKind::Triga, MethodKind::Nadtr],
        p_values: vec![1.95],
        criteria: vec![Criterion::Iterations, Criterion::CpuTime],
        output: dir.path().to_owned(),
        ..Default::default()
    };
    let clock = Instant::now();
    let outcome = sweep(&config).map_err(|e| e.to_string())?;
    let secs = clock.elapsed().as_secs_f64();
    let wins = |criterion: Criterion| -> Option<(usize, usize)> {
        let cmp = outcome.comparisons.iter().find(|c| c.criterion == criterion)?;
        let s = cmp.profile.solvers.iter().position(|n| n == "triga_p1.95")?;
        Some((cmp.profile.wins(s), cmp.profile.problems.len()))
    };
    let (it_wins, total) = wins(Criterion::Iterations).ok_or("no iterations profile")?;
    let time = wins(Criterion::CpuTime).map_or("none".into(), |(w, n)| format!("{w} of {n}"));
    check(
        secs < 120.0 && 2 * it_wins > total,
        format!("TRIGA p=1.95 ratio 1 on {it_wins} of {total} problems by iterations (CPU time: {time}); sweep took {secs:.1}s"),
    )
}

fn main() {
    let (c1, c3) = rates();
    let results: Vec<(&str, Verdict)> = vec![
        ("1 power-schedule value rates", c1),
        ("2 critical-schedule rates", critical_rate()),
        ("3 velocity rates", c3),
        ("4 minimum-norm selection", min_norm_selection()),
        ("5 Lyapunov audit", lyapunov_audit()),
        ("6 viscosity lemmas", viscosity_lemmas()),
        ("7 parameter certification", parameter_certification()),
        ("8 descent lemmas", descent_lemmas()),
        ("9 performance profiles", profile_correctness()),
        ("10 gradient checks", gradient_checks()),
        ("11 miniature benchmark sweep", miniature_sweep()),
    ];
    let mut failed = 0;
    for (name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
