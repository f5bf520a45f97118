use std::io::{BufRead, Write};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::state::Stride;

pub const CSV_HEADER: &str = "k,f_gap,grad_norm,velocity,dist_to_xstar,epsilon,wall_time";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: u64,
    pub f_gap: f64,
    pub grad_norm: f64,
    /// `‖x_k − x_{k−1}‖`.
    pub velocity: f64,
    pub dist_to_xstar: Option<f64>,
    /// Regularization weight applied at `k` (absent for NAG).
    pub epsilon: Option<f64>,
    /// Seconds since the solve loop started.
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    IterationCap,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::IterationCap => "iteration_cap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub method: String,
    pub records: Vec<TraceRecord>,
    pub status: Status,
    pub stride: Stride,
    pub gradient_tolerance: f64,
    /// Value subtracted from `f` to form `f_gap`.
    pub reference_value: Option<f64>,
    /// Indices where NADTR fell back to `y_k = x_k`.
    pub degenerate_steps: Vec<u64>,
    /// Full iterates inside the requested window.
    #[serde(skip)]
    pub iterates: Vec<(u64, DVector<f64>)>,
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl Trace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Index of the final iterate.
    pub fn final_k(&self) -> u64 {
        self.last().map_or(0, |r| r.k)
    }

    pub fn final_wall_time(&self) -> f64 {
        self.last().map_or(0.0, |r| r.wall_time)
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn record_at(&self, k: u64) -> Option<&TraceRecord> {
        self.records
            .binary_search_by_key(&k, |r| r.k)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn iterate(&self, k: u64) -> Option<&DVector<f64>> {
        self.iterates
            .binary_search_by_key(&k, |(i, _)| *i)
            .ok()
            .map(|i| &self.iterates[i].1)
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.k,
                fmt_f64(r.f_gap),
                fmt_f64(r.grad_norm),
                fmt_f64(r.velocity),
                fmt_opt(r.dist_to_xstar),
                fmt_opt(r.epsilon),
                fmt_f64(r.wall_time)
            )?;
        }
        Ok(())
    }

    /// Writes `k,x_1,…,x_n` rows for the stored iterates.
    pub fn write_iterates_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        for (k, x) in &self.iterates {
            write!(out, "{k}")?;
            for v in x.iter() {
                write!(out, ",{}", fmt_f64(*v))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

pub fn read_trace_csv(reader: impl BufRead) -> Result<Vec<TraceRecord>> {
    let origin = "trace.csv";
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(origin, 1, "empty trace"))?
        .map_err(|e| Error::io(origin, e))?;
    if header.trim() != CSV_HEADER {
        return Err(Error::parse(origin, 1, format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let no = i + 2;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::parse(
                origin,
                no,
                format!("expected 7 fields, found {}", f.len()),
            ));
        }
        let num = |t: &str| -> Result<f64> {
            t.parse()
                .map_err(|_| Error::parse(origin, no, format!("{t:?} is not a number")))
        };
        let opt = |t: &str| -> Result<Option<f64>> {
            if t.is_empty() {
                Ok(None)
            } else {
                num(t).map(Some)
            }
        };
        records.push(TraceRecord {
            k: f[0]
                .parse()
                .map_err(|_| Error::parse(origin, no, format!("{:?} is not an index", f[0])))?,
            f_gap: num(f[1])?,
            grad_norm: num(f[2])?,
            velocity: num(f[3])?,
            dist_to_xstar: opt(f[4])?,
            epsilon: opt(f[5])?,
            wall_time: num(f[6])?,
        });
    }
    Ok(records)
}

pub fn read_iterates_csv(reader: impl BufRead) -> Result<Vec<(u64, DVector<f64>)>> {
    let origin = "iterates.csv";
    let mut out: Vec<(u64, DVector<f64>)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let no = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let k: u64 = fields
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(origin, no, "missing iteration index"))?;
        let values: Vec<f64> = fields
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(origin, no, e.to_string()))?;
        if let Some((prev, x)) = out.last() {
            if k <= *prev || values.len() != x.len() {
                return Err(Error::parse(origin, no, "indices must increase and widths must agree"));
            }
        }
        out.push((k, DVector::from_vec(values)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let trace = Trace {
            method: "triga".into(),
            records: vec![
                TraceRecord {
                    k: 1,
                    f_gap: 0.1 + 0.2,
                    grad_norm: 1.0 / 3.0,
                    velocity: 0.0,
                    dist_to_xstar: None,
                    epsilon: Some(1.0),
                    wall_time: 1e-7,
                },
                TraceRecord {
                    k: 2,
                    f_gap: -1e-300,
                    grad_norm: std::f64::consts::PI,
                    velocity: 2.5e-17,
                    dist_to_xstar: Some(0.7),
                    epsilon: None,
                    wall_time: 2e-7,
                },
            ],
            status: Status::Converged,
            stride: Stride::Default,
            gradient_tolerance: 1e-6,
            reference_value: Some(0.0),
            degenerate_steps: vec![],
            iterates: vec![(1, DVector::from_vec(vec![0.1, 1.0 / 7.0]))],
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        assert_eq!(read_trace_csv(&buf[..]).unwrap(), trace.records);
        let mut buf = Vec::new();
        trace.write_iterates_csv(&mut buf).unwrap();
        assert_eq!(read_iterates_csv(&buf[..]).unwrap(), trace.iterates);
    }
}
