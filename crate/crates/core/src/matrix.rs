use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real symmetric matrix stored as its packed upper triangle.
///
/// Only one triangle exists in memory, so `get(i, j) == get(j, i)` holds
/// bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds the matrix by calling `f(i, j)` once for every `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        SymmetricMatrix { n, upper }
    }

    /// Packs values listed in upper-triangle row order (`(0,0), (0,1), .., (1,1), ..`).
    pub(crate) fn from_packed(n: usize, upper: Vec<f64>) -> Self {
        debug_assert_eq!(upper.len(), n * (n + 1) / 2);
        SymmetricMatrix { n, upper }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_upper_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_upper_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Converts a dense row-major matrix. Rejects ragged rows, non-finite
    /// entries and any asymmetry (compared exactly).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::input(format!("entry ({i},{j}) is not finite")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::input(format!(
                        "matrix is not symmetric at ({i},{j}): {} vs {}",
                        rows[i][j], rows[j][i]
                    )));
                }
            }
        }
        Ok(Self::from_upper_fn(n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        // rows 0..r contribute n + (n-1) + .. + (n-r+1) entries
        r * self.n - r * (r.saturating_sub(1)) / 2 + (c - r)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index ({i},{j}) out of bounds");
        self.upper[self.offset(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                acc += v * v;
            }
        }
        acc.sqrt()
    }

    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.get(i, j) - other.get(i, j);
                acc += d * d;
            }
        }
        acc.sqrt()
    }
}

impl Serialize for SymmetricMatrix {
    /// Serializes as the full square matrix, one array per row.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.n))?;
        for i in 0..self.n {
            let row: Vec<f64> = (0..self.n).map(|j| self.get(i, j)).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Symmetric matrix with one display label per row/column.
///
/// Serialized as `{"labels": [...], "values": [[...], ...]}` with the full
/// square matrix. Deserialization checks symmetry exactly; missing labels
/// default to `t0`, `t1`, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LabeledRepr", into = "LabeledRepr")]
pub struct LabeledMatrix {
    labels: Vec<String>,
    values: SymmetricMatrix,
}

/// Gram matrix of pairwise kernel values.
pub type GramMatrix = LabeledMatrix;

impl LabeledMatrix {
    pub fn new(labels: Vec<String>, values: SymmetricMatrix) -> Result<Self> {
        if labels.len() != values.dim() {
            return Err(Error::input(format!(
                "{} labels for a {}x{} matrix",
                labels.len(),
                values.dim(),
                values.dim()
            )));
        }
        Ok(LabeledMatrix { labels, values })
    }

    /// Labels `t0`, `t1`, ... for an unlabeled matrix.
    pub fn unlabeled(values: SymmetricMatrix) -> Self {
        let labels = default_labels(values.dim());
        LabeledMatrix { labels, values }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &SymmetricMatrix {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Entry addressed by labels. Panics on unknown labels.
    pub fn by_label(&self, a: &str, b: &str) -> f64 {
        let i = self
            .index_of(a)
            .unwrap_or_else(|| panic!("unknown label {a}"));
        let j = self
            .index_of(b)
            .unwrap_or_else(|| panic!("unknown label {b}"));
        self.get(i, j)
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

#[derive(Serialize, Deserialize)]
struct LabeledRepr {
    #[serde(default)]
    labels: Option<Vec<String>>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<LabeledRepr> for LabeledMatrix {
    type Error = Error;

    fn try_from(repr: LabeledRepr) -> Result<Self> {
        let values = SymmetricMatrix::from_rows(&repr.values)?;
        match repr.labels {
            Some(labels) => LabeledMatrix::new(labels, values),
            None => Ok(LabeledMatrix::unlabeled(values)),
        }
    }
}

impl From<LabeledMatrix> for LabeledRepr {
    fn from(m: LabeledMatrix) -> Self {
        LabeledRepr {
            values: m.values.to_rows(),
            labels: Some(m.labels),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_indexing_matches_dense() {
        let n = 7;
        let m = SymmetricMatrix::from_upper_fn(n, |i, j| (10 * i + j) as f64);
        for i in 0..n {
            for j in 0..n {
                let (r, c) = if i <= j { (i, j) } else { (j, i) };
                assert_eq!(m.get(i, j), (10 * r + c) as f64);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_rows() {
        let err = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn rejects_ragged_and_nan() {
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).is_err());
        assert!(SymmetricMatrix::from_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn json_defaults_labels() {
        let m: LabeledMatrix = serde_json::from_str(r#"{"values":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(m.labels(), &["t0".to_string(), "t1".to_string()]);
        assert_eq!(m.values(), &SymmetricMatrix::identity(2));
    }

    #[test]
    fn trace_and_norm() {
        let m = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(m.trace(), 4.0);
        assert!((m.frobenius_norm() - 18f64.sqrt()).abs() < 1e-15);
    }
}
