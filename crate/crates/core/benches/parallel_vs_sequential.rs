//! Sequential vs rayon execution of the data-parallel paths.
//!
//! Run with: cargo bench -p oakernel
//!
//! With `--no-default-features` both variants take the sequential path,
//! which gives the fallback's baseline.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oakernel::counterexample::gamma_sweep_with;
use oakernel::spectral::DEFAULT_PSD_TOL;
use oakernel::{
    jacobi_eigen, oa_gram_with, solve_max_assignment, BaseKernelSpec, Execution, ProfitMatrix,
    TupleObject,
};

const POLICIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

/// Deterministic pseudo-random coordinates in [0, 4).
fn lcg_points(seed: u64, count: usize) -> Vec<[f64; 2]> {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0
    };
    (0..count).map(|_| [next(), next()]).collect()
}

fn dataset(tuples: usize, max_len: usize) -> Vec<TupleObject> {
    (0..tuples)
        .map(|i| {
            let len = 1 + (i * 7) % max_len;
            TupleObject::of_points(format!("t{i}"), &lcg_points(i as u64, len)).unwrap()
        })
        .collect()
}

fn bench_gram(c: &mut Criterion) {
    let base = BaseKernelSpec::rbf(0.5).unwrap();
    let mut group = c.benchmark_group("oa_gram");
    for (tuples, max_len) in [(24, 6), (60, 12)] {
        let data = dataset(tuples, max_len);
        for (name, exec) in POLICIES {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{tuples}x{max_len}")),
                &data,
                |b, data| b.iter(|| oa_gram_with(black_box(data), &base, exec).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let grid: Vec<f64> = (1..=64).map(|k| k as f64 * 0.1).collect();
    let mut group = c.benchmark_group("gamma_sweep");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| gamma_sweep_with(black_box(&grid), DEFAULT_PSD_TOL, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_kernels(c: &mut Criterion) {
    let p = ProfitMatrix::from_fn(40, 40, |i, j| ((i * 31 + j * 17) % 23) as f64 / 23.0).unwrap();
    c.bench_function("solve_max_assignment_40x40", |b| {
        b.iter(|| solve_max_assignment(black_box(&p)))
    });
    let data = dataset(40, 5);
    let g = oa_gram_with(
        &data,
        &BaseKernelSpec::rbf(0.5).unwrap(),
        Execution::Sequential,
    )
    .unwrap();
    c.bench_function("jacobi_eigen_40", |b| {
        b.iter(|| jacobi_eigen(black_box(g.values())).unwrap())
    });
}

criterion_group!(benches, bench_gram, bench_sweep, bench_kernels);
criterion_main!(benches);
