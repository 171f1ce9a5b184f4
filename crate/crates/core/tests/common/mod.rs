#![allow(dead_code)]

use nalgebra::DMatrix;
use oakernel::{ProfitMatrix, SymmetricMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_profit(rng: &mut impl Rng, rows: usize, cols: usize) -> ProfitMatrix {
    ProfitMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>()).unwrap()
}

/// Random rectangular profit matrix with `min(m, n) <= max_small`.
pub fn random_rectangular(rng: &mut impl Rng, max_small: usize, max_large: usize) -> ProfitMatrix {
    let small = rng.gen_range(1..=max_small);
    let large = rng.gen_range(small..=max_large.max(small));
    if rng.gen_bool(0.5) {
        random_profit(rng, small, large)
    } else {
        random_profit(rng, large, small)
    }
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> SymmetricMatrix {
    SymmetricMatrix::from_upper_fn(n, |_, _| scale * (2.0 * rng.gen::<f64>() - 1.0))
}

/// Eigenvalues in ascending order from nalgebra's solver, used as an
/// independent reference for the Jacobi implementation.
pub fn reference_eigenvalues(m: &SymmetricMatrix) -> Vec<f64> {
    let n = m.dim();
    let dense = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let mut ev: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
