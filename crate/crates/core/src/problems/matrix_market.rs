//! Reader for real-valued MatrixMarket files (`coordinate` and `array`).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DesignMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<DesignMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(BufReader::new(file), path)
}

/// Parses MatrixMarket text; `origin` only labels error messages.
///
/// Coordinate files produce CSR storage, array files dense storage.
/// Symmetric and skew-symmetric files are expanded to full storage.
pub fn parse_matrix_market(reader: impl BufRead, origin: impl AsRef<Path>) -> Result<DesignMatrix> {
    let origin = origin.as_ref();
    let err = |line: usize, msg: String| Error::parse(origin, line, msg);

    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let header = header.map_err(|e| Error::io(origin, e))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, format!("malformed header {header:?}")));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(err(1, format!("unknown storage format {other:?}"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(err(1, format!("field {other:?} is not real-valued"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(err(1, format!("unsupported symmetry {other:?}"))),
    };

    let mut data = lines.filter_map(|(no, l)| match l {
        Ok(text) => {
            let t = text.trim().to_owned();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((no, t)))
            }
        }
        Err(e) => Some(Err(Error::io(origin, e))),
    });

    let (size_line, size) = data.next().ok_or_else(|| err(1, "missing size line".into()))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(size_line, format!("bad size line: {e}")))?;
    let expected_fields = if layout == Layout::Coordinate { 3 } else { 2 };
    if dims.len() != expected_fields {
        return Err(err(
            size_line,
            format!("size line needs {expected_fields} integers, found {}", dims.len()),
        ));
    }
    let (nrows, ncols) = (dims[0], dims[1]);
    if symmetry != Symmetry::General && nrows != ncols {
        return Err(err(size_line, "symmetric storage requires a square matrix".into()));
    }

    let parse_value = |line: usize, tok: &str| -> Result<f64> {
        let v: f64 = tok
            .parse()
            .map_err(|_| err(line, format!("value {tok:?} is not a real number")))?;
        if !v.is_finite() {
            return Err(err(line, format!("value {tok:?} is not finite")));
        }
        Ok(v)
    };

    match layout {
        Layout::Coordinate => {
            let declared = dims[2];
            let mut triplets = Vec::with_capacity(declared * 2);
            let mut count = 0usize;
            let mut last_line = size_line;
            for item in data {
                let (line, text) = item?;
                last_line = line;
                count += 1;
                if count > declared {
                    return Err(err(line, format!("more entries than the declared {declared}")));
                }
                let fields: Vec<&str> = text.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(err(line, format!("expected `row col value`, found {text:?}")));
                }
                let index = |tok: &str, bound: usize, what: &str| -> Result<usize> {
                    let i: usize = tok
                        .parse()
                        .map_err(|_| err(line, format!("{what} index {tok:?} is not an integer")))?;
                    if i == 0 || i > bound {
                        return Err(err(
                            line,
                            format!("{what} index {i} outside 1..={bound} for a {nrows}x{ncols} matrix"),
                        ));
                    }
                    Ok(i - 1)
                };
                let r = index(fields[0], nrows, "row")?;
                let c = index(fields[1], ncols, "column")?;
                let v = parse_value(line, fields[2])?;
                triplets.push((r, c, v));
                if r != c {
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => triplets.push((c, r, v)),
                        Symmetry::SkewSymmetric => triplets.push((c, r, -v)),
                    }
                }
            }
            if count != declared {
                return Err(err(last_line, format!("declared {declared} entries but found {count}")));
            }
            Ok(CsrMatrix::from_triplets(nrows, ncols, &triplets)?.into())
        }
        Layout::Array => {
            // column-major; symmetric variants store the lower triangle only
            let mut slots = Vec::new();
            for j in 0..ncols {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::SkewSymmetric => j + 1,
                };
                for i in start..nrows {
                    slots.push((i, j));
                }
            }
            let mut dense = DMatrix::zeros(nrows, ncols);
            let mut filled = 0usize;
            let mut last_line = size_line;
            for item in data {
                let (line, text) = item?;
                last_line = line;
                let Some(&(i, j)) = slots.get(filled) else {
                    return Err(err(line, format!("more than the {} expected values", slots.len())));
                };
                let v = parse_value(line, &text)?;
                dense[(i, j)] = v;
                match symmetry {
                    Symmetry::General => {}
                    Symmetry::Symmetric => dense[(j, i)] = v,
                    Symmetry::SkewSymmetric => dense[(j, i)] = -v,
                }
                filled += 1;
            }
            if filled != slots.len() {
                return Err(err(
                    last_line,
                    format!("expected {} values but found {filled}", slots.len()),
                ));
            }
            Ok(dense.into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<DesignMatrix> {
        parse_matrix_market(text.as_bytes(), "inline.mtx")
    }

    #[test]
    fn single_entry_coordinate() {
        let m = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 3.0").unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 2));
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.to_dense().iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn symmetric_entries_are_mirrored() {
        let m = parse("%%MatrixMarket matrix coordinate real symmetric\n% note\n2 2 2\n1 1 4\n2 1 5\n").unwrap();
        assert_eq!(m.get(1, 0), 5.0);
        assert_eq!(m.get(0, 1), 5.0);
        assert_eq!(m.get(0, 0), 4.0);
    }

    #[test]
    fn out_of_range_index_names_line() {
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0").unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_real_field_rejected() {
        let e = parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn entry_count_must_match_header() {
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n2 2 1.0").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(
            parse("%%MatrixMarket tensor\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn array_general_is_column_major() {
        let m = parse("%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n").unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 2), 6.0);
    }

    #[test]
    fn array_symmetric_lower_triangle() {
        let m = parse("%%MatrixMarket matrix array real symmetric\n2 2\n1\n7\n3\n").unwrap();
        assert_eq!(m.get(0, 1), 7.0);
        assert_eq!(m.get(1, 0), 7.0);
        assert_eq!(m.get(1, 1), 3.0);
    }

    #[test]
    fn skew_symmetric_negates_mirror() {
        let m = parse("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 2.5\n").unwrap();
        assert_eq!(m.get(1, 0), 2.5);
        assert_eq!(m.get(0, 1), -2.5);
    }
}
