//! Problem addresses such as `quadratic:n=10`, `mm:data/a.mtx`,
//! `libsvm:data/b.svm` and `gaussian:m=20,n=30,rank=10`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::{gaussian_matrix, gaussian_vector, problem_rng};

use super::{load_libsvm, load_matrix_market, LeastSquares, Problem, QuadraticCoupling};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemSpec {
    Quadratic {
        n: usize,
    },
    /// Matrix from a MatrixMarket file; the right-hand side is Gaussian.
    MatrixMarket {
        path: PathBuf,
    },
    Libsvm {
        path: PathBuf,
        dimension: Option<usize>,
    },
    /// Synthetic `A = G₁G₂` (or plain `G` without `rank`) with Gaussian `b`.
    Gaussian {
        m: usize,
        n: usize,
        rank: Option<usize>,
        seed: Option<u64>,
    },
}

fn key_values(body: &str) -> Result<Vec<(&str, &str)>> {
    body.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, found {kv:?}")))
        })
        .collect()
}

fn positive(key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::InvalidInput(format!(
            "{key} must be a positive integer, found {value:?}"
        ))),
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(uri: &str) -> Result<Self> {
        let (scheme, body) = uri
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("problem {uri:?} has no scheme")))?;
        match scheme {
            "quadratic" => {
                let mut n = None;
                for (k, v) in key_values(body)? {
                    match k {
                        "n" => n = Some(positive(k, v)?),
                        _ => return Err(Error::InvalidInput(format!("unknown quadratic key {k:?}"))),
                    }
                }
                let n = n.ok_or_else(|| Error::InvalidInput("quadratic needs n=".into()))?;
                Ok(ProblemSpec::Quadratic { n })
            }
            "mm" if !body.is_empty() => Ok(ProblemSpec::MatrixMarket { path: body.into() }),
            "libsvm" if !body.is_empty() => {
                // optional trailing `,dim=N`
                let (path, dimension) = match body.rsplit_once(",dim=") {
                    Some((p, d)) => (p, Some(positive("dim", d)?)),
                    None => (body, None),
                };
                Ok(ProblemSpec::Libsvm {
                    path: path.into(),
                    dimension,
                })
            }
            "gaussian" => {
                let (mut m, mut n, mut rank, mut seed) = (None, None, None, None);
                for (k, v) in key_values(body)? {
                    match k {
                        "m" => m = Some(positive(k, v)?),
                        "n" => n = Some(positive(k, v)?),
                        "rank" => rank = Some(positive(k, v)?),
                        "seed" => {
                            seed = Some(v.parse().map_err(|_| {
                                Error::InvalidInput(format!("seed must be an unsigned integer, found {v:?}"))
                            })?)
                        }
                        _ => return Err(Error::InvalidInput(format!("unknown gaussian key {k:?}"))),
                    }
                }
                let (Some(m), Some(n)) = (m, n) else {
                    return Err(Error::InvalidInput("gaussian needs m= and n=".into()));
                };
                Ok(ProblemSpec::Gaussian { m, n, rank, seed })
            }
            _ => Err(Error::InvalidInput(format!("unrecognized problem {uri:?}"))),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Quadratic { n } => write!(f, "quadratic:n={n}"),
            ProblemSpec::MatrixMarket { path } => write!(f, "mm:{}", path.display()),
            ProblemSpec::Libsvm { path, dimension } => {
                write!(f, "libsvm:{}", path.display())?;
                if let Some(d) = dimension {
                    write!(f, ",dim={d}")?;
                }
                Ok(())
            }
            ProblemSpec::Gaussian { m, n, rank, seed } => {
                write!(f, "gaussian:m={m},n={n}")?;
                if let Some(r) = rank {
                    write!(f, ",rank={r}")?;
                }
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
        }
    }
}

impl ProblemSpec {
    /// Builds the problem; `seed` drives generated data unless the
    /// address pins its own.
    pub fn build(&self, seed: u64) -> Result<Problem> {
        match self {
            ProblemSpec::Quadratic { n } => Ok(QuadraticCoupling::new(*n).into()),
            ProblemSpec::MatrixMarket { path } => {
                let matrix = load_matrix_market(path)?;
                let rhs = gaussian_vector(&mut problem_rng(seed), matrix.nrows());
                Ok(LeastSquares::new(matrix, rhs)?.into())
            }
            ProblemSpec::Libsvm { path, dimension } => Ok(load_libsvm(path, *dimension)?.into()),
            ProblemSpec::Gaussian { m, n, rank, seed: own } => {
                let mut rng = problem_rng(own.unwrap_or(seed));
                let a = match rank {
                    Some(r) => {
                        let left = gaussian_matrix(&mut rng, *m, *r);
                        let right = gaussian_matrix(&mut rng, *r, *n);
                        left * right
                    }
                    None => gaussian_matrix(&mut rng, *m, *n),
                };
                let b = gaussian_vector(&mut rng, *m);
                Ok(LeastSquares::new(a.into(), b)?.into())
            }
        }
    }
}

pub fn parse_problem_uri(uri: &str, seed: u64) -> Result<Problem> {
    uri.parse::<ProblemSpec>()?.build(seed)
}
