//! The optimal assignment kernel on tuples and Gram-matrix assembly.
//!
//! `k_A(x, y)` is the best total base-kernel value achievable by matching
//! every element of the shorter tuple to a distinct element of the longer
//! one.

use serde::{Deserialize, Serialize};

use crate::base_kernel::{BaseKernelSpec, Element};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hungarian::{solve_max_assignment, Assignment, ProfitMatrix};
use crate::matrix::{GramMatrix, SymmetricMatrix};

/// A labeled, non-empty, ordered tuple of elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleObject {
    pub label: String,
    pub elements: Vec<Element>,
}

impl TupleObject {
    pub fn new(label: impl Into<String>, elements: Vec<Element>) -> Result<Self> {
        let label = label.into();
        if elements.is_empty() {
            return Err(Error::input(format!("tuple {label:?} is empty")));
        }
        Ok(TupleObject { label, elements })
    }

    /// Tuple of 2-D points, e.g. `TupleObject::of_points("AB", &[[0., 0.], [1., 0.]])`.
    pub fn of_points<const D: usize>(
        label: impl Into<String>,
        points: &[[f64; D]],
    ) -> Result<Self> {
        let elements = points
            .iter()
            .map(|p| Element::point(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, elements)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Profit matrix `[k1(x_i, y_j)]` with rows indexed by `x`.
pub fn profit_matrix(
    x: &TupleObject,
    y: &TupleObject,
    base: &BaseKernelSpec,
) -> Result<ProfitMatrix> {
    let mut values = Vec::with_capacity(x.len() * y.len());
    for u in &x.elements {
        for v in &y.elements {
            values.push(base.eval(u, v)?);
        }
    }
    ProfitMatrix::new(x.len(), y.len(), values).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!(
            "base kernel produced an invalid profit for ({}, {}): {msg}",
            x.label, y.label
        )),
        other => other,
    })
}

/// Optimal matching realizing `k_A(x, y)`.
pub fn oa_assignment(
    x: &TupleObject,
    y: &TupleObject,
    base: &BaseKernelSpec,
) -> Result<Assignment> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::input(
            "optimal assignment kernel needs non-empty tuples",
        ));
    }
    // Rows are x, so for |y| >= |x| the solver maps x into y and otherwise y
    // into x, matching the two branches of the kernel's definition.
    Ok(solve_max_assignment(&profit_matrix(x, y, base)?))
}

/// `k_A(x, y)`.
pub fn oa_eval(x: &TupleObject, y: &TupleObject, base: &BaseKernelSpec) -> Result<f64> {
    oa_assignment(x, y, base).map(|a| a.value)
}

/// Gram matrix of `k_A` over `tuples`, using the default execution policy.
pub fn oa_gram(tuples: &[TupleObject], base: &BaseKernelSpec) -> Result<GramMatrix> {
    oa_gram_with(tuples, base, Execution::default())
}

/// Gram matrix of `k_A` over `tuples`. Only the upper triangle is solved.
pub fn oa_gram_with(
    tuples: &[TupleObject],
    base: &BaseKernelSpec,
    exec: Execution,
) -> Result<GramMatrix> {
    if tuples.is_empty() {
        return Err(Error::input("cannot build a Gram matrix from zero tuples"));
    }
    for t in tuples {
        if t.is_empty() {
            return Err(Error::input(format!("tuple {:?} is empty", t.label)));
        }
        for e in &t.elements {
            base.check_element(e)
                .map_err(|err| Error::Input(format!("tuple {:?}: {err}", t.label)))?;
        }
    }
    let n = tuples.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let results = exec.map(&cells, |&(i, j)| oa_eval(&tuples[i], &tuples[j], base));
    // first error in cell order, independent of scheduling
    let upper = results.into_iter().collect::<Result<Vec<f64>>>()?;
    let labels = tuples.iter().map(|t| t.label.clone()).collect();
    GramMatrix::new(labels, SymmetricMatrix::from_packed(n, upper))
}

/// Input file for Gram computation:
/// `{"base_kernel": {...}, "tuples": [{"label": "AB", "elements": [[0,0],[1,0]]}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DatasetRepr")]
pub struct TupleDataset {
    pub base_kernel: BaseKernelSpec,
    pub tuples: Vec<TupleObject>,
}

#[derive(Deserialize)]
struct DatasetRepr {
    base_kernel: BaseKernelSpec,
    tuples: Vec<TupleRepr>,
}

#[derive(Deserialize)]
struct TupleRepr {
    #[serde(default)]
    label: Option<String>,
    elements: Vec<Element>,
}

impl TryFrom<DatasetRepr> for TupleDataset {
    type Error = Error;

    fn try_from(repr: DatasetRepr) -> Result<Self> {
        if repr.tuples.is_empty() {
            return Err(Error::input("dataset has no tuples"));
        }
        let tuples = repr
            .tuples
            .into_iter()
            .enumerate()
            .map(|(i, t)| TupleObject::new(t.label.unwrap_or_else(|| format!("t{i}")), t.elements))
            .collect::<Result<Vec<_>>>()?;
        Ok(TupleDataset {
            base_kernel: repr.base_kernel,
            tuples,
        })
    }
}

impl TupleDataset {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("tuple dataset: {e}")))
    }

    pub fn gram(&self) -> Result<GramMatrix> {
        oa_gram(&self.tuples, &self.base_kernel)
    }
}
