//! Exact maximum-profit assignment for rectangular profit matrices.
//!
//! The shorter side is matched injectively into the longer side. The core is
//! the O(n^3) shortest-augmenting-path Hungarian method on a square cost
//! matrix; rectangular inputs are padded with zero-profit rows and profits
//! are turned into costs as `max_entry - profit`.
//!
//! Among optimal assignments the one whose smaller-side map is
//! lexicographically smallest is returned, so results are reproducible.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest smaller-side size accepted by [`brute_force_assignment`].
pub const BRUTE_FORCE_MAX: usize = 8;

/// Nonnegative finite m x n profit matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ProfitMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::input(format!(
                "profit matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::input(format!(
                "profit matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::input(format!(
                "profit ({},{}) = {} is not a finite nonnegative number",
                k / cols,
                k % cols,
                values[k]
            )));
        }
        Ok(ProfitMatrix { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("ragged profit matrix"));
        }
        Self::new(m, n, rows.concat())
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                values.push(f(i, j));
            }
        }
        Self::new(rows, cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn transpose(&self) -> ProfitMatrix {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                values.push(self.get(i, j));
            }
        }
        ProfitMatrix {
            rows: self.cols,
            cols: self.rows,
            values,
        }
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// An injective matching between the rows and columns of a profit matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    /// `(row, col)` pairs sorted by row; `min(m, n)` of them.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the selected profits, accumulated in row order.
    pub value: f64,
}

impl Assignment {
    fn from_map(p: &ProfitMatrix, map: &[usize], transposed: bool) -> Self {
        let mut pairs: Vec<(usize, usize)> = map
            .iter()
            .enumerate()
            .map(|(s, &l)| if transposed { (l, s) } else { (s, l) })
            .collect();
        pairs.sort_unstable();
        let value = pairs.iter().map(|&(i, j)| p.get(i, j)).sum();
        Assignment { pairs, value }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, j)) in self.pairs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}->{j}")?;
        }
        write!(f, "}} = {}", self.value)
    }
}

/// Slack used to decide that two assignment values tie.
fn tie_tolerance(best: f64) -> f64 {
    64.0 * f64::EPSILON * best.abs().max(1.0)
}

/// Optimal solution of a square minimum-cost assignment with its duals.
struct SquareSolution {
    col_of: Vec<usize>,
    row_dual: Vec<f64>,
    col_dual: Vec<f64>,
}

/// Minimum-cost perfect matching on a square `n x n` cost matrix by
/// shortest augmenting paths. Duals satisfy `cost[i][j] >= u[i] + v[j]`
/// with equality on matched pairs.
fn min_cost_square(n: usize, cost: &[f64]) -> SquareSolution {
    debug_assert_eq!(cost.len(), n * n);
    // 1-based; index 0 is the virtual source column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of = vec![0usize; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    SquareSolution {
        col_of,
        row_dual: u[1..].to_vec(),
        col_dual: v[1..].to_vec(),
    }
}

/// Rewrites `col_of` into the perfect matching of `tight` whose first
/// `fixed_rows` entries are lexicographically smallest.
///
/// `col_of` must already be a perfect matching inside `tight`.
fn lex_min_matching(tight: &[Vec<bool>], col_of: &mut [usize], fixed_rows: usize) {
    let n = col_of.len();
    let mut row_of = vec![0usize; n];
    for (r, &c) in col_of.iter().enumerate() {
        row_of[c] = r;
    }
    let mut col_fixed = vec![false; n];

    // Alternating path from `row` to the free column `target`, avoiding
    // fixed and banned columns. Returns the columns visited, in order.
    fn find_path(
        tight: &[Vec<bool>],
        row_of: &[usize],
        blocked: &[bool],
        seen: &mut [bool],
        row: usize,
        target: usize,
        path: &mut Vec<usize>,
    ) -> bool {
        for c in 0..tight.len() {
            if !tight[row][c] || blocked[c] || seen[c] {
                continue;
            }
            seen[c] = true;
            path.push(c);
            if c == target || find_path(tight, row_of, blocked, seen, row_of[c], target, path) {
                return true;
            }
            path.pop();
        }
        false
    }

    for i in 0..fixed_rows {
        let current = col_of[i];
        for j in 0..current {
            if col_fixed[j] || !tight[i][j] {
                continue;
            }
            // row i takes j; the displaced row must reach i's old column
            let displaced = row_of[j];
            let mut blocked = col_fixed.clone();
            blocked[j] = true;
            let mut seen = vec![false; n];
            let mut path = Vec::new();
            if find_path(
                tight, &row_of, &blocked, &mut seen, displaced, current, &mut path,
            ) {
                let mut r = displaced;
                for &c in &path {
                    let next = row_of[c];
                    col_of[r] = c;
                    row_of[c] = r;
                    r = next;
                }
                col_of[i] = j;
                row_of[j] = i;
                break;
            }
        }
        col_fixed[col_of[i]] = true;
    }
}

/// Exact maximum-total-profit assignment of the smaller side into the larger.
///
/// Ties are broken towards the lexicographically smallest map from the
/// smaller side (rows when `m <= n`, columns otherwise).
pub fn solve_max_assignment(p: &ProfitMatrix) -> Assignment {
    let transposed = p.rows > p.cols;
    let owned;
    let wide = if transposed {
        owned = p.transpose();
        &owned
    } else {
        p
    };
    let k = wide.rows;
    let l = wide.cols;

    // zero-profit padding rows make the problem square
    let top = wide.max_entry();
    let mut cost = vec![top; l * l];
    for i in 0..k {
        for j in 0..l {
            cost[i * l + j] = top - wide.get(i, j);
        }
    }
    let sol = min_cost_square(l, &cost);
    let raw = &sol.col_of[..k];
    let raw_value: f64 = raw.iter().enumerate().map(|(i, &j)| wide.get(i, j)).sum();

    // Every optimal assignment lives on the edges with zero reduced cost.
    let slack_tol = (4.0 * (l * l) as f64 * f64::EPSILON).max(1e-12) * top.max(1.0);
    let tight: Vec<Vec<bool>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| cost[i * l + j] - sol.row_dual[i] - sol.col_dual[j] <= slack_tol)
                .collect()
        })
        .collect();
    let mut canonical = sol.col_of.clone();
    lex_min_matching(&tight, &mut canonical, k);
    let canonical_value: f64 = canonical[..k]
        .iter()
        .enumerate()
        .map(|(i, &j)| wide.get(i, j))
        .sum();

    if canonical_value >= raw_value - tie_tolerance(raw_value) {
        Assignment::from_map(p, &canonical[..k], transposed)
    } else {
        Assignment::from_map(p, raw, transposed)
    }
}

/// Exhaustive maximum over all injections, with the same tie-break as
/// [`solve_max_assignment`]. Test oracle; refuses `min(m, n) > 8`.
pub fn brute_force_assignment(p: &ProfitMatrix) -> Result<Assignment> {
    let transposed = p.rows > p.cols;
    let wide = if transposed { p.transpose() } else { p.clone() };
    let k = wide.rows;
    let l = wide.cols;
    if k > BRUTE_FORCE_MAX {
        return Err(Error::input(format!(
            "brute force supports at most {BRUTE_FORCE_MAX} rows on the smaller side, got {k}"
        )));
    }

    fn visit(
        wide: &ProfitMatrix,
        row: usize,
        map: &mut Vec<usize>,
        taken: &mut [bool],
        f: &mut dyn FnMut(&[usize], f64) -> bool,
    ) -> bool {
        if row == wide.rows {
            let value: f64 = map.iter().enumerate().map(|(i, &j)| wide.get(i, j)).sum();
            return f(map, value);
        }
        for j in 0..wide.cols {
            if taken[j] {
                continue;
            }
            taken[j] = true;
            map.push(j);
            let stop = visit(wide, row + 1, map, taken, f);
            map.pop();
            taken[j] = false;
            if stop {
                return true;
            }
        }
        false
    }

    let mut best = f64::NEG_INFINITY;
    visit(
        &wide,
        0,
        &mut Vec::new(),
        &mut vec![false; l],
        &mut |_, v| {
            best = best.max(v);
            false
        },
    );
    let tol = tie_tolerance(best);
    let mut chosen = Vec::new();
    visit(
        &wide,
        0,
        &mut Vec::new(),
        &mut vec![false; l],
        &mut |m, v| {
            if v >= best - tol {
                chosen = m.to_vec();
                true
            } else {
                false
            }
        },
    );
    Ok(Assignment::from_map(p, &chosen, transposed))
}
