use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::fmt_f64;

/// Solver-by-problem costs; `None` marks a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    pub solvers: Vec<String>,
    pub problems: Vec<String>,
    /// `costs[solver][problem]`.
    pub costs: Vec<Vec<Option<f64>>>,
}

impl CostMatrix {
    pub fn new(solvers: Vec<String>, problems: Vec<String>, costs: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if costs.len() != solvers.len() || costs.iter().any(|row| row.len() != problems.len()) {
            return Err(Error::InvalidInput(
                "cost matrix shape disagrees with its labels".into(),
            ));
        }
        if let Some(bad) = costs.iter().flatten().flatten().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "cost {bad} is not a positive finite number"
            )));
        }
        Ok(CostMatrix {
            solvers,
            problems,
            costs,
        })
    }

    /// Flat `solver,problem,cost` table; failures have an empty cost.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "solver,problem,cost")?;
        for (s, row) in self.solvers.iter().zip(&self.costs) {
            for (p, c) in self.problems.iter().zip(row) {
                writeln!(out, "{s},{p},{}", c.map(fmt_f64).unwrap_or_default())?;
            }
        }
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<Self> {
        let origin = "costs.csv";
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "solver,problem,cost" => {}
            _ => return Err(Error::parse(origin, 1, "expected header solver,problem,cost")),
        }
        let mut solvers: Vec<String> = Vec::new();
        let mut problems: Vec<String> = Vec::new();
        let mut entries = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.rsplitn(2, ',').collect();
            let (head, cost) = match fields.as_slice() {
                [cost, head] => (*head, *cost),
                _ => return Err(Error::parse(origin, i + 1, "expected three fields")),
            };
            let (solver, problem) = head
                .split_once(',')
                .ok_or_else(|| Error::parse(origin, i + 1, "expected three fields"))?;
            let cost = if cost.trim().is_empty() {
                None
            } else {
                Some(
                    cost.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(origin, i + 1, format!("{cost:?} is not a number")))?,
                )
            };
            if !solvers.iter().any(|s| s == solver) {
                solvers.push(solver.to_owned());
            }
            if !problems.iter().any(|p| p == problem) {
                problems.push(problem.to_owned());
            }
            entries.push((solver.to_owned(), problem.to_owned(), cost));
        }
        let mut costs = vec![vec![None; problems.len()]; solvers.len()];
        let mut seen = vec![vec![false; problems.len()]; solvers.len()];
        for (s, p, c) in entries {
            let si = solvers.iter().position(|x| *x == s).expect("registered");
            let pi = problems.iter().position(|x| *x == p).expect("registered");
            costs[si][pi] = c;
            seen[si][pi] = true;
        }
        let missing: Vec<String> = solvers
            .iter()
            .enumerate()
            .flat_map(|(si, s)| {
                let seen = &seen;
                problems
                    .iter()
                    .enumerate()
                    .filter(move |(pi, _)| !seen[si][*pi])
                    .map(move |(_, p)| format!("{s}/{p}"))
            })
            .collect();
        if !missing.is_empty() {
            return Err(Error::Alignment(missing));
        }
        CostMatrix::new(solvers, problems, costs)
    }
}

/// Dolan–Moré profile on the `log₂` ratio axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceProfile {
    pub solvers: Vec<String>,
    /// Problems kept after dropping those every solver failed.
    pub problems: Vec<String>,
    pub dropped: Vec<String>,
    /// `ratios[solver][problem]`; failures are `+∞`.
    pub ratios: Vec<Vec<f64>>,
    /// Sorted distinct finite `log₂` ratios.
    pub breakpoints: Vec<f64>,
    /// `curves[solver][i] = ρ_solver(breakpoints[i])`.
    pub curves: Vec<Vec<f64>>,
}

pub fn performance_profile(costs: &CostMatrix) -> Result<PerformanceProfile> {
    if costs.solvers.is_empty() || costs.problems.is_empty() {
        return Err(Error::InvalidInput("empty cost matrix".into()));
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (pi, name) in costs.problems.iter().enumerate() {
        if costs.costs.iter().any(|row| row[pi].is_some()) {
            kept.push(pi);
        } else {
            log::warn!("every solver failed on {name}; dropping it from the profile");
            dropped.push(name.clone());
        }
    }
    if kept.is_empty() {
        return Err(Error::InvalidInput("every problem failed for every solver".into()));
    }

    let ratios: Vec<Vec<f64>> = costs
        .costs
        .iter()
        .map(|row| {
            kept.iter()
                .map(|&pi| {
                    let best = costs.costs.iter().filter_map(|r| r[pi]).fold(f64::INFINITY, f64::min);
                    row[pi].map_or(f64::INFINITY, |c| c / best)
                })
                .collect()
        })
        .collect();

    let mut breakpoints: Vec<f64> = ratios
        .iter()
        .flatten()
        .filter(|r| r.is_finite())
        .map(|r| r.log2())
        .collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();

    let n_p = kept.len() as f64;
    let curves = ratios
        .iter()
        .map(|row| {
            let mut logs: Vec<f64> = row.iter().map(|r| r.log2()).collect();
            logs.sort_by(f64::total_cmp);
            breakpoints
                .iter()
                .map(|&t| logs.partition_point(|&l| l <= t) as f64 / n_p)
                .collect()
        })
        .collect();

    Ok(PerformanceProfile {
        solvers: costs.solvers.clone(),
        problems: kept.iter().map(|&pi| costs.problems[pi].clone()).collect(),
        dropped,
        ratios,
        breakpoints,
        curves,
    })
}

impl PerformanceProfile {
    /// `ρ_s(t)` for any `t`; 0 below the first breakpoint.
    pub fn rho(&self, solver: usize, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i == 0 {
            0.0
        } else {
            self.curves[solver][i - 1]
        }
    }

    /// Number of problems on which `solver` has ratio 1.
    pub fn wins(&self, solver: usize) -> usize {
        self.ratios[solver].iter().filter(|&&r| r == 1.0).count()
    }

    /// `t,rho_<solver>,…` rows, one per breakpoint.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        write!(out, "t")?;
        for s in &self.solvers {
            write!(out, ",rho_{s}")?;
        }
        writeln!(out)?;
        for (i, t) in self.breakpoints.iter().enumerate() {
            write!(out, "{}", fmt_f64(*t))?;
            for curve in &self.curves {
                write!(out, ",{}", fmt_f64(curve[i]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<Option<f64>>>) -> CostMatrix {
        let solvers = (0..rows.len()).map(|i| format!("s{i}")).collect();
        let problems = (0..rows[0].len()).map(|i| format!("p{i}")).collect();
        CostMatrix::new(solvers, problems, rows).unwrap()
    }

    #[test]
    fn hand_enumerated_two_by_two() {
        let prof = performance_profile(&matrix(vec![vec![Some(1.0), Some(4.0)], vec![Some(2.0), Some(2.0)]])).unwrap();
        assert_eq!(prof.ratios, vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(prof.rho(0, 0.0), 0.5);
        assert_eq!(prof.rho(0, 1.0), 1.0);
        assert_eq!(prof.rho(1, 0.0), 0.5);
        assert_eq!(prof.rho(1, 1.0), 1.0);
    }

    #[test]
    fn single_solver() {
        let prof = performance_profile(&matrix(vec![vec![Some(3.0), Some(7.0)]])).unwrap();
        assert_eq!(prof.rho(0, 0.0), 1.0);
    }

    #[test]
    fn failures_plateau_and_all_failed_is_dropped() {
        let prof = performance_profile(&matrix(vec![
            vec![Some(1.0), None, None],
            vec![Some(2.0), Some(5.0), None],
        ]))
        .unwrap();
        assert_eq!(prof.dropped, vec!["p2".to_string()]);
        assert_eq!(prof.problems.len(), 2);
        assert!(prof.ratios[0][1].is_infinite());
        assert_eq!(prof.rho(0, 1e9), 0.5);
        assert_eq!(prof.rho(1, 1e9), 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let m = matrix(vec![vec![Some(1.5), None], vec![Some(0.25), Some(3.0)]]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(CostMatrix::read_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), m);
    }

    #[test]
    fn incomplete_csv_is_misaligned() {
        let err = CostMatrix::read_csv("solver,problem,cost\na,x,1\nb,y,2\n").unwrap_err();
        match err {
            Error::Alignment(missing) => assert_eq!(missing, vec!["a/y".to_string(), "b/x".to_string()]),
            other => panic!("{other}"),
        }
    }
}
