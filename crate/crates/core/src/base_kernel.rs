//! Base kernels on tuple elements.
//!
//! Two families are supported: the Gaussian RBF kernel on points of R^d, and
//! an explicit symmetric table on named labels. The singleton kernel with
//! `k(1, 1) = 1` is a one-entry table.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::spectral;

/// A point of R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("point has no coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("point has a non-finite coordinate"));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Squared Euclidean distance, summed in coordinate order.
    pub fn squared_distance(&self, other: &Point) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::input(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        let mut acc = 0.0;
        for (a, b) in self.0.iter().zip(&other.0) {
            let d = a - b;
            acc += d * d;
        }
        Ok(acc)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// One element of a tuple: a point for the RBF kernel or a label for a table.
///
/// In JSON a point is an array of numbers and a label is a string or an
/// integer (integers are read as their decimal string).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub enum Element {
    Point(Point),
    Label(String),
}

impl Element {
    pub fn point(coords: &[f64]) -> Result<Self> {
        Point::new(coords.to_vec()).map(Element::Point)
    }

    pub fn label(name: impl Into<String>) -> Self {
        Element::Label(name.into())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Point(p) => p.fmt(f),
            Element::Label(l) => f.write_str(l),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ElementRepr {
    Coords(Vec<f64>),
    Text(String),
    Integer(i64),
}

impl TryFrom<ElementRepr> for Element {
    type Error = Error;

    fn try_from(repr: ElementRepr) -> Result<Self> {
        match repr {
            ElementRepr::Coords(c) => Point::new(c).map(Element::Point),
            ElementRepr::Text(s) => Ok(Element::Label(s)),
            ElementRepr::Integer(i) => Ok(Element::Label(i.to_string())),
        }
    }
}

impl From<Element> for ElementRepr {
    fn from(e: Element) -> Self {
        match e {
            Element::Point(p) => ElementRepr::Coords(p.0),
            Element::Label(l) => ElementRepr::Text(l),
        }
    }
}

/// Gaussian RBF kernel `exp(-gamma * |u - v|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rbf {
    gamma: f64,
}

impl Rbf {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::config(format!(
                "rbf gamma must be finite and positive, got {gamma}"
            )));
        }
        Ok(Rbf { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eval(&self, u: &Point, v: &Point) -> Result<f64> {
        Ok((-self.gamma * u.squared_distance(v)?).exp())
    }
}

/// Kernel given by an explicit table over labels, stored as one triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct TableKernel {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    values: SymmetricMatrix,
}

impl TableKernel {
    /// Builds a table from a full square matrix.
    ///
    /// Shape, duplicate labels, finiteness and exact symmetry are checked
    /// here. Negative entries are accepted and reported by
    /// [`validate_base`]; the assignment solver refuses them at evaluation.
    pub fn new(labels: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::config("table kernel has no labels"));
        }
        if values.len() != labels.len() {
            return Err(Error::config(format!(
                "table has {} labels but {} rows",
                labels.len(),
                values.len()
            )));
        }
        let values = SymmetricMatrix::from_rows(&values).map_err(|e| match e {
            Error::Input(msg) => Error::Config(format!("table values: {msg}")),
            other => other,
        })?;
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::config(format!("duplicate table label {l:?}")));
            }
        }
        Ok(TableKernel {
            labels,
            index,
            values,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &SymmetricMatrix {
        &self.values
    }

    fn lookup(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown table label {label:?}")))
    }

    pub fn eval(&self, u: &str, v: &str) -> Result<f64> {
        Ok(self.values.get(self.lookup(u)?, self.lookup(v)?))
    }

    fn is_constant_one(&self) -> bool {
        self.labels.len() == 1
            && self.labels[0] == CONSTANT_ONE_LABEL
            && self.values.get(0, 0) == 1.0
    }
}

/// Label of the single element of the singleton base set.
pub const CONSTANT_ONE_LABEL: &str = "1";

/// Base kernel on tuple elements.
///
/// JSON forms: `{"type":"rbf","gamma":g}`, `{"type":"constant_one"}`,
/// `{"type":"table","labels":[...],"values":[[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BaseKernelRepr", into = "BaseKernelRepr")]
pub enum BaseKernelSpec {
    Rbf(Rbf),
    Table(TableKernel),
}

impl BaseKernelSpec {
    pub fn rbf(gamma: f64) -> Result<Self> {
        Rbf::new(gamma).map(BaseKernelSpec::Rbf)
    }

    /// The singleton set `{1}` with `k(1, 1) = 1`.
    pub fn constant_one() -> Self {
        let table = TableKernel::new(vec![CONSTANT_ONE_LABEL.to_string()], vec![vec![1.0]])
            .expect("constant table is well formed");
        BaseKernelSpec::Table(table)
    }

    pub fn table(labels: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        TableKernel::new(labels, values).map(BaseKernelSpec::Table)
    }

    /// Evaluates `k1(u, v)`.
    pub fn eval(&self, u: &Element, v: &Element) -> Result<f64> {
        match (self, u, v) {
            (BaseKernelSpec::Rbf(k), Element::Point(a), Element::Point(b)) => k.eval(a, b),
            (BaseKernelSpec::Table(t), Element::Label(a), Element::Label(b)) => t.eval(a, b),
            (BaseKernelSpec::Rbf(_), _, _) => Err(Error::input(
                "rbf kernel expects point elements, got a label",
            )),
            (BaseKernelSpec::Table(_), _, _) => Err(Error::input(
                "table kernel expects label elements, got a point",
            )),
        }
    }

    /// Checks that `e` can be fed to this kernel.
    pub fn check_element(&self, e: &Element) -> Result<()> {
        match (self, e) {
            (BaseKernelSpec::Rbf(_), Element::Point(_)) => Ok(()),
            (BaseKernelSpec::Table(t), Element::Label(l)) => t.lookup(l).map(|_| ()),
            _ => self.eval(e, e).map(|_| ()),
        }
    }
}

/// Free-function form of [`BaseKernelSpec::eval`].
pub fn eval_base(spec: &BaseKernelSpec, u: &Element, v: &Element) -> Result<f64> {
    spec.eval(u, v)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum BaseKernelRepr {
    Rbf {
        gamma: f64,
    },
    ConstantOne,
    Table {
        labels: Vec<String>,
        values: Vec<Vec<f64>>,
    },
}

impl TryFrom<BaseKernelRepr> for BaseKernelSpec {
    type Error = Error;

    fn try_from(repr: BaseKernelRepr) -> Result<Self> {
        match repr {
            BaseKernelRepr::Rbf { gamma } => BaseKernelSpec::rbf(gamma),
            BaseKernelRepr::ConstantOne => Ok(BaseKernelSpec::constant_one()),
            BaseKernelRepr::Table { labels, values } => BaseKernelSpec::table(labels, values),
        }
    }
}

impl From<BaseKernelSpec> for BaseKernelRepr {
    fn from(spec: BaseKernelSpec) -> Self {
        match spec {
            BaseKernelSpec::Rbf(k) => BaseKernelRepr::Rbf { gamma: k.gamma },
            BaseKernelSpec::Table(t) if t.is_constant_one() => BaseKernelRepr::ConstantOne,
            BaseKernelSpec::Table(t) => BaseKernelRepr::Table {
                values: t.values.to_rows(),
                labels: t.labels,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeValue {
    pub left: String,
    pub right: String,
    pub value: f64,
}

/// Findings of [`validate_base`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub sample_size: usize,
    /// Sample index pairs `(i, j)` where `k1(s_i, s_j) != k1(s_j, s_i)`.
    pub symmetry_violations: Vec<(usize, usize)>,
    /// Negative kernel values on the sample, and for tables anywhere in the table.
    pub negative_values: Vec<NegativeValue>,
    /// Elements the kernel could not evaluate.
    pub errors: Vec<String>,
    /// Smallest eigenvalue of the base Gram matrix on the sample. Informational only.
    pub min_eigenvalue: Option<f64>,
    pub passed: bool,
}

/// Checks the hypotheses the assignment kernel needs from its base kernel
/// (symmetry, nonnegative values) on a sample and reports the base spectrum.
pub fn validate_base(spec: &BaseKernelSpec, sample: &[Element]) -> ValidationReport {
    let mut report = ValidationReport {
        sample_size: sample.len(),
        symmetry_violations: Vec::new(),
        negative_values: Vec::new(),
        errors: Vec::new(),
        min_eigenvalue: None,
        passed: false,
    };
    if sample.is_empty() {
        report.errors.push("empty sample".to_string());
        return report;
    }
    for (i, e) in sample.iter().enumerate() {
        if let Err(err) = spec.check_element(e) {
            report
                .errors
                .push(format!("sample element {i} ({e}): {err}"));
        }
    }
    if let BaseKernelSpec::Table(t) = spec {
        for i in 0..t.labels.len() {
            for j in i..t.labels.len() {
                let v = t.values.get(i, j);
                if v < 0.0 {
                    report.negative_values.push(NegativeValue {
                        left: t.labels[i].clone(),
                        right: t.labels[j].clone(),
                        value: v,
                    });
                }
            }
        }
    }
    if !report.errors.is_empty() {
        return report;
    }

    let n = sample.len();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // check_element passed for every element, so evaluation cannot fail
            rows[i][j] = spec.eval(&sample[i], &sample[j]).unwrap_or(f64::NAN);
        }
    }
    let from_table = matches!(spec, BaseKernelSpec::Table(_));
    for i in 0..n {
        for j in i..n {
            if rows[i][j] != rows[j][i] {
                report.symmetry_violations.push((i, j));
            }
            if rows[i][j] < 0.0 && !from_table {
                report.negative_values.push(NegativeValue {
                    left: sample[i].to_string(),
                    right: sample[j].to_string(),
                    value: rows[i][j],
                });
            }
        }
    }
    if report.symmetry_violations.is_empty() {
        let gram = SymmetricMatrix::from_upper_fn(n, |i, j| rows[i][j]);
        report.min_eigenvalue = spectral::jacobi_eigen(&gram).ok().map(|s| s.min_eigenvalue);
    }
    report.passed = report.symmetry_violations.is_empty() && report.negative_values.is_empty();
    report
}
