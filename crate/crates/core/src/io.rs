//! Reading sequences and matrices from JSON or CSV files, and writing
//! K-curves as CSV.
//!
//! JSON input is either a bare array (`[1, 0.5]`, `[[1, 2], [3, 4]]`) or an
//! object with a `values` / `rows` field. Anything else is read as CSV or
//! whitespace-separated numbers; `inf` is accepted.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::kfunc::KCurve;
use crate::operators::DenseMatrix;
use crate::parse::parse_real;
use crate::sequences::RawSequence;

#[derive(Deserialize)]
#[serde(untagged)]
enum SequenceJson {
    Bare(Vec<f64>),
    Wrapped { values: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixJson {
    Bare(Vec<Vec<f64>>),
    Wrapped { rows: Vec<Vec<f64>> },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn looks_like_json(text: &str) -> bool {
    matches!(text.trim_start().chars().next(), Some('[') | Some('{'))
}

/// Rows of numbers from CSV or whitespace-separated text. Blank lines and
/// lines starting with `#` are skipped, as is a first row with no numbers.
fn numeric_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::InvalidInput(e.to_string()))?;
        let fields: Vec<&str> = record.iter().flat_map(str::split_whitespace).collect();
        if fields.is_empty() {
            continue;
        }
        match fields.iter().map(|f| parse_real(f)).collect::<Result<Vec<f64>>>() {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 && fields.iter().all(|f| parse_real(f).is_err()) => continue,
            Err(e) => return Err(Error::InvalidInput(format!("line {}: {e}", i + 1))),
        }
    }
    Ok(rows)
}

pub fn parse_sequence(text: &str) -> Result<RawSequence> {
    let values = if looks_like_json(text) {
        match serde_json::from_str::<SequenceJson>(text).map_err(|e| Error::InvalidInput(e.to_string()))? {
            SequenceJson::Bare(v) | SequenceJson::Wrapped { values: v } => v,
        }
    } else {
        numeric_rows(text)?.into_iter().flatten().collect()
    };
    RawSequence::new(values)
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let rows = if looks_like_json(text) {
        match serde_json::from_str::<MatrixJson>(text).map_err(|e| Error::InvalidInput(e.to_string()))? {
            MatrixJson::Bare(r) | MatrixJson::Wrapped { rows: r } => r,
        }
    } else {
        numeric_rows(text)?
    };
    DenseMatrix::from_rows(&rows)
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn read_sequence(path: &Path) -> Result<RawSequence> {
    with_path(path, parse_sequence(&read(path)?))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    with_path(path, parse_matrix(&read(path)?))
}

/// Writes `t,K,method` rows with a header.
pub fn write_kcurve<W: Write>(out: W, curve: &KCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(e.to_string());
    w.write_record(["t", "K", "method"]).map_err(io)?;
    let method = curve.method.to_string();
    for (t, k) in curve.t.iter().zip(&curve.k) {
        w.write_record([format!("{t:e}"), format!("{k:e}"), method.clone()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kfunc::{k_curve, KMethod, SequenceCouple};
    use crate::sequences::decreasing_rearrangement;

    #[test]
    fn sequence_formats_agree() {
        let expected = vec![1.0, 0.5, 0.25];
        for text in ["[1, 0.5, 0.25]", "{\"values\": [1, 0.5, 0.25]}", "1,0.5,0.25\n", "x\n1\n0.5\n0.25\n", "# c\n1 0.5\n0.25"] {
            assert_eq!(parse_sequence(text).unwrap().values(), expected.as_slice(), "{text}");
        }
    }

    #[test]
    fn matrix_formats_agree() {
        let a = parse_matrix("[[1, 2], [3, 4]]").unwrap();
        let b = parse_matrix("1,2\n3,4\n").unwrap();
        let c = parse_matrix("{\"rows\": [[1, 2], [3, 4]]}").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.at(1, 0), 3.0);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(parse_sequence("1,abc").is_err());
        assert!(parse_sequence("[1, \"x\"]").is_err());
        assert!(parse_matrix("1,2\n3\n").is_err());
    }

    #[test]
    fn kcurve_csv_round_trip() {
        let x = decreasing_rearrangement(&parse_sequence("[2, 1]").unwrap());
        let curve = k_curve(&x, &SequenceCouple::l1_linf(), &[0.5, 1.5], KMethod::Exact).unwrap();
        let mut buf = Vec::new();
        write_kcurve(&mut buf, &curve).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,K,method");
        let row: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap(), 2.5);
        assert_eq!(row[2], "exact");
    }
}
