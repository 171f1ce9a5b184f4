//! Reproducible certificate that the optimal assignment kernel is not
//! positive definite, plus the positive case over a singleton base set.
//!
//! The construction: four corners of the unit square `A=(0,0)`, `B=(1,0)`,
//! `C=(1,1)`, `D=(0,1)` under an RBF base kernel with `a = exp(-gamma)`, and
//! the six 2-tuples of distinct corners in the order `AB, AC, AD, BC, BD, CD`.
//! Their Gram matrix has a closed form in `a`, a negative quadratic form along
//! a fixed witness vector, and induced distances that cannot all be realized
//! in a Hilbert space.

use serde::Serialize;

use crate::base_kernel::{BaseKernelSpec, Element, Point, CONSTANT_ONE_LABEL};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::{GramMatrix, LabeledMatrix, SymmetricMatrix};
use crate::oa_kernel::{oa_gram, TupleObject};
use crate::spectral::{
    distances_from_gram, jacobi_eigen, psd_check, quadratic_form, DistanceMatrix, PsdVerdict,
    Spectrum, DEFAULT_PSD_TOL,
};

/// The six 2-subsets of `{A, B, C, D}` in lexicographic order.
pub const PAIR_ORDER: [&str; 6] = ["AB", "AC", "AD", "BC", "BD", "CD"];

/// `v^T K v = 8a^2 - 8a`: the two diagonal pairs weighted -2, the rest +1.
///
/// Expanding over the closed-form Gram: the diagonal gives `12 * 2 = 24`;
/// the eight `1+a` pairs each carry weight product `-2`, giving
/// `2 * (-16)(1+a)`; the four `1+a^2` pairs carry `+1`, giving `2 * 4(1+a^2)`;
/// the `2a` pairs carry `+1, +1, +4`, giving `2 * 6 * 2a`. The sum is
/// `24 - 32 - 32a + 8 + 8a^2 + 24a = 8a^2 - 8a`.
pub const WITNESS: [f64; 6] = [1.0, -2.0, 1.0, 1.0, -2.0, 1.0];

/// Directions with `v^T K v = 0` for every `a`: the two squares
/// `(AB, AC, CD, BD)` and `(AD, AC, BC, BD)` of the forced configuration.
/// For the first, `8 + 2(-4(1+a) + 4a) = 0`.
pub const NULL_DIRECTIONS: [[f64; 6]; 2] = [
    [1.0, -1.0, 0.0, 0.0, -1.0, 1.0],
    [0.0, -1.0, 1.0, 1.0, -1.0, 0.0],
];

/// Squared norm of [`WITNESS`].
pub const WITNESS_NORM_SQ: f64 = 12.0;

/// Allowed entrywise gap between the computed and closed-form Gram matrices.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// The four square corners and the kernel parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareConfig {
    pub gamma: f64,
    /// `exp(-gamma)`, the base kernel between adjacent corners.
    pub a: f64,
    pub points: Vec<(String, [f64; 2])>,
    pub pair_order: Vec<String>,
}

impl SquareConfig {
    pub fn base_kernel(&self) -> BaseKernelSpec {
        BaseKernelSpec::rbf(self.gamma).expect("gamma validated at construction")
    }

    fn corner(&self, name: char) -> [f64; 2] {
        self.points
            .iter()
            .find(|(l, _)| l.starts_with(name))
            .map(|(_, p)| *p)
            .expect("corner exists")
    }

    /// The six 2-tuples in [`PAIR_ORDER`].
    pub fn tuples(&self) -> Vec<TupleObject> {
        PAIR_ORDER
            .iter()
            .map(|pair| {
                let elements = pair
                    .chars()
                    .map(|c| Element::Point(Point::new(self.corner(c).to_vec()).expect("finite")))
                    .collect();
                TupleObject::new(*pair, elements).expect("two elements")
            })
            .collect()
    }
}

pub fn build_square_config(gamma: f64) -> Result<SquareConfig> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::config(format!(
            "gamma must be finite and positive, got {gamma}"
        )));
    }
    Ok(SquareConfig {
        gamma,
        a: (-gamma).exp(),
        points: vec![
            ("A".into(), [0.0, 0.0]),
            ("B".into(), [1.0, 0.0]),
            ("C".into(), [1.0, 1.0]),
            ("D".into(), [0.0, 1.0]),
        ],
        pair_order: PAIR_ORDER.iter().map(|s| s.to_string()).collect(),
    })
}

fn pair_index(label: &str) -> usize {
    PAIR_ORDER
        .iter()
        .position(|p| *p == label)
        .expect("known pair")
}

/// Pairs of 2-tuples sharing one corner, the other corners being adjacent.
const ONE_PLUS_A: [(&str, &str); 8] = [
    ("AB", "AC"),
    ("AB", "BD"),
    ("BC", "BD"),
    ("BC", "AC"),
    ("CD", "AC"),
    ("CD", "BD"),
    ("AD", "AC"),
    ("AD", "BD"),
];
/// Pairs of adjacent edges of the square.
const ONE_PLUS_A_SQ: [(&str, &str); 4] = [("AB", "BC"), ("BC", "CD"), ("CD", "AD"), ("AB", "AD")];
/// Disjoint pairs.
const TWO_A: [(&str, &str); 3] = [("AB", "CD"), ("AD", "BC"), ("AC", "BD")];

/// The 6x6 Gram matrix of the square's 2-tuples written down from its case
/// table: 2 on the diagonal, then `1+a`, `1+a^2` or `2a` per pair class.
pub fn expected_gram_closed_form(gamma: f64) -> Result<GramMatrix> {
    let a = build_square_config(gamma)?.a;
    let mut rows = vec![vec![f64::NAN; 6]; 6];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 2.0;
    }
    let classes: [(&[(&str, &str)], f64); 3] = [
        (&ONE_PLUS_A, 1.0 + a),
        (&ONE_PLUS_A_SQ, 1.0 + a * a),
        (&TWO_A, 2.0 * a),
    ];
    for (pairs, value) in classes {
        for (x, y) in pairs {
            let (i, j) = (pair_index(x), pair_index(y));
            rows[i][j] = value;
            rows[j][i] = value;
        }
    }
    debug_assert!(rows.iter().flatten().all(|v| v.is_finite()));
    LabeledMatrix::new(
        PAIR_ORDER.iter().map(|s| s.to_string()).collect(),
        SymmetricMatrix::from_rows(&rows)?,
    )
}

/// Everything needed to audit the refutation at one value of gamma.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub config: SquareConfig,
    pub gram_computed: GramMatrix,
    pub gram_closed_form: GramMatrix,
    pub max_abs_gram_diff: f64,
    pub spectrum: Spectrum,
    pub verdict: PsdVerdict,
    pub witness: [f64; 6],
    /// `v^T K v` along [`WITNESS`]; `8a^2 - 8a` in closed form.
    pub witness_value: f64,
    pub witness_closed_form: f64,
    /// `witness_value / |witness|^2`, an upper bound on the smallest eigenvalue.
    pub rayleigh_bound: f64,
    pub null_direction_values: [f64; 2],
    pub distances: DistanceMatrix,
    /// `d^2(hyp) - d^2(leg1) - d^2(leg2)` for the four half-squares
    /// `(AB,AC,CD)`, `(AB,BD,CD)`, `(AD,AC,BC)`, `(AD,BD,BC)`.
    pub pythagorean_residuals: [f64; 4],
    /// `d^2(AC,BD) - d^2(AB,CD)` and `d^2(AC,BD) - d^2(AD,BC)`: equal diagonals.
    pub diagonal_residuals: [f64; 2],
    /// `d^2` of the rectangle sides `(AB,BC)`, `(BC,CD)`, `(CD,AD)`, `(AD,AB)`.
    pub side_lengths_sq: [f64; 4],
    /// Diagonal the rectangle would need if it were a square: `sqrt(4 - 4a^2)`.
    pub hyp_expected: f64,
    /// Diagonal dictated by the kernel: `d(AB,CD) = sqrt(4 - 4a)`.
    pub hyp_actual: f64,
    pub contradiction_gap: f64,
    pub tol: f64,
    pub refuted: bool,
    pub notes: Vec<String>,
}

const READING_NOTES: [&str; 2] = [
    "the equal-diagonal identity d(AC,BD) = d(AB,CD) is checked on squared distances (both 4-4a)",
    "the adjacent-edge class includes the pair (CD,AD) with value 1+a^2",
];

/// Builds the 2-tuple Gram matrix through the assignment kernel, checks it
/// against the closed form, and evaluates every step of the refutation.
///
/// `refuted` holds iff the spectrum fails the PSD check at `tol` and the
/// hypotenuse contradiction gap exceeds `tol`.
pub fn run_counterexample(gamma: f64, tol: f64) -> Result<CounterexampleReport> {
    let config = build_square_config(gamma)?;
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::config(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let a = config.a;
    let gram_computed = oa_gram(&config.tuples(), &config.base_kernel())?;
    let gram_closed_form = expected_gram_closed_form(gamma)?;
    let max_abs_gram_diff = gram_computed
        .values()
        .max_abs_diff(gram_closed_form.values());
    if max_abs_gram_diff > CLOSED_FORM_TOL {
        return Err(Error::Consistency(format!(
            "assignment-kernel Gram differs from the closed form by {max_abs_gram_diff:e} at gamma={gamma}"
        )));
    }

    let spectrum = jacobi_eigen(gram_computed.values())?;
    let verdict = psd_check(&spectrum, tol);
    let witness_value = quadratic_form(gram_computed.values(), &WITNESS)?;
    let null_direction_values = [
        quadratic_form(gram_computed.values(), &NULL_DIRECTIONS[0])?,
        quadratic_form(gram_computed.values(), &NULL_DIRECTIONS[1])?,
    ];

    let distances = distances_from_gram(&gram_computed);
    let d2 = |x: &str, y: &str| distances.squared_by_label(x, y);
    let pythagorean_residuals = [
        d2("AB", "CD") - d2("AB", "AC") - d2("AC", "CD"),
        d2("AB", "CD") - d2("AB", "BD") - d2("BD", "CD"),
        d2("AD", "BC") - d2("AD", "AC") - d2("AC", "BC"),
        d2("AD", "BC") - d2("AD", "BD") - d2("BD", "BC"),
    ];
    let diagonal_residuals = [
        d2("AC", "BD") - d2("AB", "CD"),
        d2("AC", "BD") - d2("AD", "BC"),
    ];
    let side_lengths_sq = [
        d2("AB", "BC"),
        d2("BC", "CD"),
        d2("CD", "AD"),
        d2("AD", "AB"),
    ];
    // equal sides make the rectangle a square whose diagonal follows from Pythagoras
    let hyp_expected = (side_lengths_sq[0] + side_lengths_sq[1]).sqrt();
    let hyp_actual = distances.distance_by_label("AB", "CD");
    let contradiction_gap = hyp_expected - hyp_actual;

    Ok(CounterexampleReport {
        witness: WITNESS,
        witness_closed_form: 8.0 * a * a - 8.0 * a,
        rayleigh_bound: witness_value / WITNESS_NORM_SQ,
        refuted: !verdict.psd && contradiction_gap > tol,
        config,
        gram_computed,
        gram_closed_form,
        max_abs_gram_diff,
        spectrum,
        verdict,
        witness_value,
        null_direction_values,
        distances,
        pythagorean_residuals,
        diagonal_residuals,
        side_lengths_sq,
        hyp_expected,
        hyp_actual,
        contradiction_gap,
        tol,
        notes: READING_NOTES.iter().map(|s| s.to_string()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub a: f64,
    pub lambda_min: f64,
    pub witness_value: f64,
    pub contradiction_gap: f64,
    pub refuted: bool,
}

impl From<&CounterexampleReport> for SweepRow {
    fn from(r: &CounterexampleReport) -> Self {
        SweepRow {
            gamma: r.config.gamma,
            a: r.config.a,
            lambda_min: r.spectrum.min_eigenvalue,
            witness_value: r.witness_value,
            contradiction_gap: r.contradiction_gap,
            refuted: r.refuted,
        }
    }
}

pub const SWEEP_CSV_HEADER: &str = "gamma,a,lambda_min,witness_value,contradiction_gap,refuted";

/// Runs the counterexample at every gamma of `grid`; rows follow grid order.
pub fn gamma_sweep(grid: &[f64]) -> Result<Vec<SweepRow>> {
    gamma_sweep_with(grid, DEFAULT_PSD_TOL, Execution::default())
}

pub fn gamma_sweep_with(grid: &[f64], tol: f64, exec: Execution) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::config("gamma grid is empty"));
    }
    if let Some(g) = grid.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::config(format!(
            "gamma grid values must be positive, got {g}"
        )));
    }
    exec.map(grid, |&g| {
        run_counterexample(g, tol).map(|r| SweepRow::from(&r))
    })
    .into_iter()
    .collect()
}

/// Sweep table as CSV with [`SWEEP_CSV_HEADER`].
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.gamma, r.a, r.lambda_min, r.witness_value, r.contradiction_gap, r.refuted
        ));
    }
    out
}

/// Outcome of [`verify_min_kernel_psd`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinKernelVerdict {
    pub lengths: Vec<usize>,
    pub gram: GramMatrix,
    /// Entries `(i, j)` where the Gram value differs from `min(len_i, len_j)`.
    pub mismatches: Vec<(usize, usize)>,
    pub eigenvalues: Vec<f64>,
    pub verdict: PsdVerdict,
    pub psd: bool,
}

/// Builds tuples of repeated singleton elements with the given lengths and
/// confirms that their assignment-kernel Gram is the min kernel and PSD.
pub fn verify_min_kernel_psd(lengths: &[usize], tol: f64) -> Result<MinKernelVerdict> {
    if lengths.is_empty() {
        return Err(Error::input("no lengths given"));
    }
    if lengths.contains(&0) {
        return Err(Error::input("lengths must be positive"));
    }
    let tuples = lengths
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            TupleObject::new(format!("t{i}"), vec![Element::label(CONSTANT_ONE_LABEL); n])
        })
        .collect::<Result<Vec<_>>>()?;
    let gram = oa_gram(&tuples, &BaseKernelSpec::constant_one())?;
    let mut mismatches = Vec::new();
    for i in 0..lengths.len() {
        for j in i..lengths.len() {
            if gram.get(i, j) != lengths[i].min(lengths[j]) as f64 {
                mismatches.push((i, j));
            }
        }
    }
    let spectrum = jacobi_eigen(gram.values())?;
    let verdict = psd_check(&spectrum, tol);
    Ok(MinKernelVerdict {
        lengths: lengths.to_vec(),
        psd: mismatches.is_empty() && verdict.psd,
        gram,
        mismatches,
        eigenvalues: spectrum.eigenvalues,
        verdict,
    })
}
