//! Matrix and report serialization.
//!
//! Matrices are read from either JSON (`{"labels": [...], "values": [[...]]}`)
//! or header-free row-major CSV. Floats are written in their shortest
//! round-trip decimal form, so reading an output back gives identical bits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Parses a matrix, choosing JSON when the text starts with `{`.
pub fn parse_matrix(text: &str) -> Result<LabeledMatrix> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("matrix json: {e}")))
    } else {
        parse_matrix_csv(text)
    }
}

pub fn parse_matrix_csv(text: &str) -> Result<LabeledMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Input(format!("matrix csv: {e}")))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|e| Error::Input(format!("matrix csv row {i}: {field:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::input("matrix csv is empty"));
    }
    Ok(LabeledMatrix::unlabeled(SymmetricMatrix::from_rows(&rows)?))
}

pub fn matrix_to_csv(m: &SymmetricMatrix) -> String {
    let mut out = String::new();
    for row in m.to_rows() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_matrix(m: &LabeledMatrix, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(m),
        Format::Csv => Ok(matrix_to_csv(m.values())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_with_spaces_and_trailing_newline() {
        let m = parse_matrix("1, 0.5\n0.5, 2\n").unwrap();
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.labels(), &["t0".to_string(), "t1".to_string()]);
    }

    #[test]
    fn csv_errors() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("1,x\nx,1\n").is_err());
        assert!(parse_matrix("1,2\n3,1\n").is_err());
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip_bit_exact(vals in prop::collection::vec(-1e6f64..1e6, 10)) {
            // 4x4 upper triangle has 10 entries
            let mut it = vals.iter().copied();
            let m = SymmetricMatrix::from_upper_fn(4, |_, _| it.next().unwrap());
            let lm = LabeledMatrix::unlabeled(m.clone());
            let from_csv = parse_matrix(&write_matrix(&lm, Format::Csv).unwrap()).unwrap();
            prop_assert_eq!(from_csv.values(), &m);
            let from_json = parse_matrix(&write_matrix(&lm, Format::Json).unwrap()).unwrap();
            prop_assert_eq!(from_json, lm);
        }
    }
}
