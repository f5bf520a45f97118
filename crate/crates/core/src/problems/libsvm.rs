//! LIBSVM sparse text format: `label idx:val idx:val …` with 1-based indices.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

use super::logistic::LogisticRegression;

pub fn load_libsvm(path: impl AsRef<Path>, dimension_hint: Option<usize>) -> Result<LogisticRegression> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_libsvm(BufReader::new(file), path, dimension_hint)
}

/// Labels `+1`/`1` map to `+1`; `-1` and `0` map to `-1`. Anything else is
/// rejected.
pub fn parse_libsvm(
    reader: impl BufRead,
    origin: impl AsRef<Path>,
    dimension_hint: Option<usize>,
) -> Result<LogisticRegression> {
    let origin = origin.as_ref();
    let mut labels = Vec::new();
    let mut triplets = Vec::new();
    let mut width = 0usize;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| Error::parse(origin, line_no, msg);
        let line = line.map_err(|e| Error::io(origin, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a token");
        let raw: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("label {label_tok:?} is not numeric")))?;
        let label = if raw == 1.0 {
            1.0
        } else if raw == -1.0 || raw == 0.0 {
            -1.0
        } else {
            return Err(err(format!("label {label_tok:?} cannot be mapped to ±1")));
        };
        let row = labels.len();
        labels.push(label);

        let mut previous = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("feature {tok:?} is not `index:value`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(format!("index {idx:?} is not a positive integer")))?;
            if idx == 0 {
                return Err(err("indices are 1-based".into()));
            }
            if idx <= previous {
                return Err(err(format!(
                    "indices must be strictly increasing ({idx} after {previous})"
                )));
            }
            previous = idx;
            let val: f64 = val.parse().map_err(|_| err(format!("value {val:?} is not numeric")))?;
            if !val.is_finite() {
                return Err(err(format!("value {val:?} is not finite")));
            }
            width = width.max(idx);
            triplets.push((row, idx - 1, val));
        }
    }

    if let Some(hint) = dimension_hint {
        width = width.max(hint);
    }
    let features = CsrMatrix::from_triplets(labels.len(), width, &triplets)?;
    LogisticRegression::new(features.into(), labels)
}

/// Writes the problem back in LIBSVM format (zero features omitted).
pub fn write_libsvm(problem: &LogisticRegression, mut out: impl Write) -> std::io::Result<()> {
    for (row, &label) in problem.labels().iter().enumerate() {
        write!(out, "{}", if label > 0.0 { "+1" } else { "-1" })?;
        for (c, v) in problem.features().row_entries(row) {
            if v != 0.0 {
                write!(out, " {}:{}", c + 1, v)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, hint: Option<usize>) -> Result<LogisticRegression> {
        parse_libsvm(text.as_bytes(), "inline.svm", hint)
    }

    #[test]
    fn sparse_row_is_expanded() {
        let p = parse("+1 1:0.5 3:-2\n", None).unwrap();
        assert_eq!(p.labels(), &[1.0]);
        assert_eq!(p.dimension(), 3);
        let dense = p.features().to_dense();
        assert_eq!(dense.row(0).iter().copied().collect::<Vec<_>>(), vec![0.5, 0.0, -2.0]);
    }

    #[test]
    fn zero_one_labels_are_remapped() {
        let p = parse("0 2:1\n1 1:1\n", None).unwrap();
        assert_eq!(p.labels(), &[-1.0, 1.0]);
        let dense = p.features().to_dense();
        assert_eq!(dense.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn decreasing_indices_fail_with_line() {
        let e = parse("+1 1:1\n+1 3:1 2:1\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn bad_label_and_value() {
        assert!(matches!(parse("2 1:1\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("+1 1:abc\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("\n-1 0:1\n", None), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn dimension_hint_widens() {
        let p = parse("-1 2:1\n", Some(5)).unwrap();
        assert_eq!(p.dimension(), 5);
        let p = parse("-1 7:1\n", Some(5)).unwrap();
        assert_eq!(p.dimension(), 7);
    }
}
