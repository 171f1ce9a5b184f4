//! Symmetric eigendecomposition and the diagnostics built on it: PSD
//! verdicts, quadratic forms, distances induced by a Gram matrix, and
//! projection onto the PSD cone by eigenvalue clipping.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{GramMatrix, LabeledMatrix, SymmetricMatrix};

/// Default relative tolerance for PSD verdicts.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius norm is below this times `|G|_F`.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 50;
/// Squared distances below `-METRIC_VIOLATION_TOL` are reported as violations.
pub const METRIC_VIOLATION_TOL: f64 = 1e-9;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Verdict at [`DEFAULT_PSD_TOL`]; use [`psd_check`] for another tolerance.
    pub psd: bool,
    /// `min_eigenvalue / max(1, max_eigenvalue)`.
    pub margin: f64,
    pub sweeps: usize,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.iter().map(|row| row[k]).collect()
    }

    /// `V diag(f(lambda)) V^T`, upper triangle only.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let n = self.dim();
        let scaled: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymmetricMatrix::from_upper_fn(n, |i, j| {
            let vi = &self.eigenvectors[i];
            let vj = &self.eigenvectors[j];
            let mut acc = 0.0;
            for k in 0..n {
                acc += scaled[k] * vi[k] * vj[k];
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvectors are normalized so that their largest-magnitude component
/// (first one on ties) is nonnegative.
pub fn jacobi_eigen(g: &SymmetricMatrix) -> Result<Spectrum> {
    let n = g.dim();
    if n == 0 {
        return Err(Error::input("cannot decompose an empty matrix"));
    }
    let mut a = g.to_rows();
    if a.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::input("matrix has non-finite entries"));
    }
    let mut v = SymmetricMatrix::identity(n).to_rows();
    let threshold = JACOBI_OFF_DIAGONAL_TOL * g.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal norm {off:e})"
            )));
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k][k]).collect();
    let mut eigenvectors = vec![vec![0.0; n]; n];
    for (col, &k) in order.iter().enumerate() {
        let mut lead = 0;
        for r in 1..n {
            if v[r][k].abs() > v[lead][k].abs() {
                lead = r;
            }
        }
        let sign = if v[lead][k] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            eigenvectors[r][col] = sign * v[r][k];
        }
    }

    let max_eigenvalue = eigenvalues[0];
    let min_eigenvalue = eigenvalues[n - 1];
    let verdict = verdict(min_eigenvalue, max_eigenvalue, DEFAULT_PSD_TOL);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        min_eigenvalue,
        max_eigenvalue,
        psd: verdict.psd,
        margin: verdict.margin,
        sweeps,
    })
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                acc += x * x;
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `a[p][q]` with a plane rotation and accumulates it into `v`.
fn rotate(a: &mut [Vec<f64>], v: &mut [Vec<f64>], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    // smaller root of t^2 + 2 theta t - 1 = 0
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.len();
    for k in 0..n {
        let (akp, akq) = (a[k][p], a[k][q]);
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[p][k], a[q][k]);
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for row in v.iter_mut() {
        let (vkp, vkq) = (row[p], row[q]);
        row[p] = c * vkp - s * vkq;
        row[q] = s * vkp + c * vkq;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub margin: f64,
    pub tol: f64,
}

fn verdict(min: f64, max: f64, tol: f64) -> PsdVerdict {
    let scale = max.max(1.0);
    PsdVerdict {
        psd: min >= -tol * scale,
        min_eigenvalue: min,
        max_eigenvalue: max,
        margin: min / scale,
        tol,
    }
}

/// PSD iff `lambda_min >= -tol * max(1, lambda_max)`. Negative `tol` counts as 0.
pub fn psd_check(s: &Spectrum, tol: f64) -> PsdVerdict {
    verdict(s.min_eigenvalue, s.max_eigenvalue, tol.max(0.0))
}

/// `v^T G v`, accumulated over `i` then `j`.
pub fn quadratic_form(g: &SymmetricMatrix, v: &[f64]) -> Result<f64> {
    let n = g.dim();
    if v.len() != n {
        return Err(Error::input(format!(
            "vector of length {} for a {n}x{n} matrix",
            v.len()
        )));
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += v[i] * g.get(i, j) * v[j];
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricViolation {
    pub left: String,
    pub right: String,
    /// The negative value of `G_ii + G_jj - 2 G_ij`.
    pub squared: f64,
}

/// Distances `d(i, j) = |phi(i) - phi(j)|` implied by a Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    /// `G_ii + G_jj - 2 G_ij`, unclamped; zero on the diagonal.
    pub squared: SymmetricMatrix,
    /// `sqrt(max(0, squared))`.
    pub distances: SymmetricMatrix,
    pub violations: Vec<MetricViolation>,
}

impl DistanceMatrix {
    fn index(&self, label: &str) -> usize {
        self.labels
            .iter()
            .position(|l| l == label)
            .unwrap_or_else(|| panic!("unknown label {label}"))
    }

    pub fn squared_by_label(&self, a: &str, b: &str) -> f64 {
        self.squared.get(self.index(a), self.index(b))
    }

    pub fn distance_by_label(&self, a: &str, b: &str) -> f64 {
        self.distances.get(self.index(a), self.index(b))
    }
}

pub fn distances_from_gram(g: &GramMatrix) -> DistanceMatrix {
    let n = g.dim();
    let squared = SymmetricMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            g.get(i, i) + g.get(j, j) - 2.0 * g.get(i, j)
        }
    });
    let distances = SymmetricMatrix::from_upper_fn(n, |i, j| squared.get(i, j).max(0.0).sqrt());
    let mut violations = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = squared.get(i, j);
            if d2 < -METRIC_VIOLATION_TOL {
                violations.push(MetricViolation {
                    left: g.labels()[i].clone(),
                    right: g.labels()[j].clone(),
                    squared: d2,
                });
            }
        }
    }
    DistanceMatrix {
        labels: g.labels().to_vec(),
        squared,
        distances,
        violations,
    }
}

/// Result of projecting a matrix onto the PSD cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipReport {
    pub projected: GramMatrix,
    /// Eigenvalues that were set to zero.
    pub clipped_eigenvalues: Vec<f64>,
    /// `|projected - input|_F`.
    pub frobenius_distance: f64,
    /// `sqrt(sum of clipped eigenvalues squared)`; equals the distance above up to round-off.
    pub expected_distance: f64,
}

/// Frobenius-nearest PSD matrix: negative eigenvalues are replaced by zero.
/// PSD inputs are returned unchanged.
pub fn psd_project_clip(g: &GramMatrix) -> Result<GramMatrix> {
    psd_project_clip_report(g).map(|r| r.projected)
}

pub fn psd_project_clip_report(g: &GramMatrix) -> Result<ClipReport> {
    let spectrum = jacobi_eigen(g.values())?;
    let clipped_eigenvalues: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l < 0.0)
        .collect();
    // subtract the negative part rather than rebuilding from the positive
    // one: round-off then scales with the clipped eigenvalues, not with |G|
    let negative_part = spectrum.reconstruct_with(|l| l.min(0.0));
    let values =
        SymmetricMatrix::from_upper_fn(g.dim(), |i, j| g.get(i, j) - negative_part.get(i, j));
    let frobenius_distance = values.frobenius_distance(g.values());
    let expected_distance = clipped_eigenvalues
        .iter()
        .map(|l| l * l)
        .sum::<f64>()
        .sqrt();
    Ok(ClipReport {
        projected: LabeledMatrix::new(g.labels().to_vec(), values)?,
        clipped_eigenvalues,
        frobenius_distance,
        expected_distance,
    })
}
