//! Flat-text persistence for rating matrices.
//!
//! Format: line 1 is the header `user_id,a0,a1,...,a{n-1}`; each following
//! line is `u{i}` plus one field per article. Present ratings are rendered
//! with exactly one decimal digit (`9.5`, `-10.0`), missing cells are empty
//! fields. Separator `,`, line terminator LF, UTF-8. `parse` accepts an
//! optional trailing CR per line so CRLF files still load.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::matrix::{MatrixError, RatingsMatrix};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("parse error at line {line}, field {field}: {reason}")]
    Parse {
        line: usize,
        field: usize,
        reason: String,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn parse_err(line: usize, field: usize, reason: impl Into<String>) -> CsvError {
    CsvError::Parse {
        line,
        field,
        reason: reason.into(),
    }
}

/// Renders a matrix in the flat-text format. Byte-exact for a given matrix.
pub fn write_csv<W: Write>(m: &RatingsMatrix, mut w: W) -> io::Result<()> {
    write!(w, "user_id")?;
    for a in 0..m.n_articles() {
        write!(w, ",a{a}")?;
    }
    writeln!(w)?;
    for u in 0..m.n_users() {
        write!(w, "u{u}")?;
        for cell in m.row(u) {
            match cell {
                Some(r) => write!(w, ",{r}")?,
                None => write!(w, ",")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn to_csv_string(m: &RatingsMatrix) -> String {
    let mut out = Vec::new();
    write_csv(m, &mut out).expect("writing to memory cannot fail");
    String::from_utf8(out).expect("format is ASCII")
}

pub fn save_csv(m: &RatingsMatrix, path: &Path) -> Result<(), CsvError> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    write_csv(m, &mut file)?;
    file.flush()?;
    Ok(())
}

/// Parses the flat-text format and validates the resulting matrix.
pub fn parse_csv(text: &str) -> Result<RatingsMatrix, CsvError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n').enumerate();

    let (_, header) = lines.next().unwrap_or((0, ""));
    let header = header.strip_suffix('\r').unwrap_or(header);
    let mut header_fields = header.split(',');
    match header_fields.next() {
        Some("user_id") => {}
        _ => return Err(parse_err(1, 1, "header must start with `user_id`")),
    }
    let mut n_articles = 0usize;
    for (i, field) in header_fields.enumerate() {
        if field != format!("a{i}") {
            return Err(parse_err(1, i + 2, format!("expected column label `a{i}`")));
        }
        n_articles = i + 1;
    }
    if n_articles == 0 {
        return Err(MatrixError::EmptyMatrix.into());
    }

    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for (idx, raw_line) in lines {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() {
            return Err(parse_err(line_no, 1, "empty line"));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_articles + 1 {
            return Err(parse_err(
                line_no,
                fields.len(),
                format!("expected {} fields, found {}", n_articles + 1, fields.len()),
            ));
        }
        let row_index = rows.len();
        if fields[0] != format!("u{row_index}") {
            return Err(parse_err(
                line_no,
                1,
                format!("expected row label `u{row_index}`"),
            ));
        }
        let mut row = Vec::with_capacity(n_articles);
        for (i, field) in fields[1..].iter().enumerate() {
            if field.is_empty() {
                row.push(None);
                continue;
            }
            let value: f64 = field
                .parse()
                .map_err(|_| parse_err(line_no, i + 2, format!("invalid rating `{field}`")))?;
            if !value.is_finite() {
                return Err(parse_err(line_no, i + 2, "rating must be finite"));
            }
            row.push(Some(value));
        }
        rows.push(row);
    }

    Ok(RatingsMatrix::from_rows(&rows)?)
}

pub fn load_csv(path: &Path) -> Result<RatingsMatrix, CsvError> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::f1;

    #[test]
    fn f1_serializes_to_expected_layout() {
        let text = to_csv_string(&f1());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "user_id,a0,a1,a2,a3,a4");
        assert_eq!(lines[1], "u0,9.5,8.0,,2.0,9.4");
        assert_eq!(lines[2], "u1,9.4,,7.0,,9.6");
        assert_eq!(lines[3], "u2,1.0,2.0,3.0,4.0,5.0");
        assert_eq!(lines[4], "u3,,9.9,9.8,,");
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn round_trip_preserves_cells() {
        let m = f1();
        assert_eq!(parse_csv(&to_csv_string(&m)).unwrap(), m);
    }

    #[test]
    fn save_and_load_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f1.csv");
        let m = f1();
        save_csv(&m, &path).unwrap();
        assert_eq!(load_csv(&path).unwrap(), m);
    }

    #[test]
    fn empty_destination_is_io_failure() {
        assert!(matches!(
            save_csv(&f1(), Path::new("")),
            Err(CsvError::Io(_))
        ));
    }

    #[test]
    fn ragged_row_is_parse_error() {
        let text = "user_id,a0,a1,a2,a3,a4\nu0,9.5,8.0,,2.0\n";
        match parse_csv(text) {
            Err(CsvError::Parse { line: 2, .. }) => {}
            other => panic!("expected ragged-row parse error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_cell_is_reported_with_position() {
        let text = "user_id,a0\nu0,11.0\n";
        match parse_csv(text) {
            Err(CsvError::Matrix(MatrixError::ValueOutOfRange { user: 0, article: 0 })) => {}
            other => panic!("expected out-of-range error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("user_id\n").is_err()); // zero articles
        assert!(parse_csv("id,a0\nu0,1.0\n").is_err()); // bad header
        assert!(parse_csv("user_id,a0\nu1,1.0\n").is_err()); // bad row label
        assert!(parse_csv("user_id,a0\nu0,nan\n").is_err()); // non-finite
        assert!(parse_csv("user_id,a0\n").is_err()); // zero users
        assert!(parse_csv("user_id,a0,a2\nu0,1.0,1.0\n").is_err()); // label gap
    }

    #[test]
    fn crlf_input_still_parses() {
        let text = "user_id,a0\r\nu0,1.5\r\n";
        let m = parse_csv(text).unwrap();
        assert_eq!(m.get(0, 0).unwrap().to_string(), "1.5");
    }
}
