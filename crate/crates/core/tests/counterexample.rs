mod common;

use oakernel::counterexample::{NULL_DIRECTIONS, WITNESS};
use oakernel::spectral::{psd_project_clip_report, DEFAULT_PSD_TOL};
use oakernel::{
    expected_gram_closed_form, gamma_sweep, oa_gram, quadratic_form, run_counterexample,
    verify_min_kernel_psd, Execution,
};
use rand::Rng;

const GRID: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0];

// Smallest eigenvalues of the six-tuple Gram matrix, from an independent
// LAPACK eigensolve (numpy.linalg.eigvalsh) of the brute-force kernel matrix.
const REFERENCE_LAMBDA_MIN: [f64; 6] = [
    -0.057983974131075915,
    -0.11734470464801758,
    -0.16443807047180461,
    -0.16099456484273028,
    -0.07982016831122143,
    -0.004468294083288668,
];

#[test]
fn computed_gram_matches_closed_form_across_gammas() {
    for g in GRID.iter().copied().chain([0.01, 0.7, 3.3, 10.0]) {
        let r = run_counterexample(g, DEFAULT_PSD_TOL).unwrap();
        assert!(r.max_abs_gram_diff <= 1e-12, "gamma {g}");
    }
}

#[test]
fn lambda_min_matches_reference() {
    for (g, want) in GRID.iter().zip(REFERENCE_LAMBDA_MIN) {
        let r = run_counterexample(*g, DEFAULT_PSD_TOL).unwrap();
        assert!(
            (r.spectrum.min_eigenvalue - want).abs() <= 1e-12,
            "gamma {g}"
        );
        let reference = common::reference_eigenvalues(r.gram_computed.values());
        assert!((reference[0] - want).abs() <= 1e-12);
        // exactly one negative direction
        assert_eq!(
            r.spectrum.eigenvalues.iter().filter(|l| **l < 0.0).count(),
            1
        );
    }
}

#[test]
fn witness_and_rayleigh_bound() {
    for g in GRID {
        let r = run_counterexample(g, DEFAULT_PSD_TOL).unwrap();
        let a = r.config.a;
        assert!((r.witness_value - (8.0 * a * a - 8.0 * a)).abs() <= 1e-12);
        assert!(r.spectrum.min_eigenvalue <= (8.0 * a * a - 8.0 * a) / 12.0);
        for v in r.null_direction_values {
            assert!(v.abs() <= 1e-12);
        }
    }
}

#[test]
fn forms_on_closed_form_gram() {
    let g = expected_gram_closed_form(1.0).unwrap();
    for i in 0..6 {
        let mut e = [0.0; 6];
        e[i] = 1.0;
        assert_eq!(quadratic_form(g.values(), &e).unwrap(), 2.0);
    }
    assert!((quadratic_form(g.values(), &WITNESS).unwrap() - (-1.8603532634786370)).abs() <= 1e-12);
    for v in NULL_DIRECTIONS {
        assert!(quadratic_form(g.values(), &v).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn distance_identities() {
    let r = run_counterexample(1.0, DEFAULT_PSD_TOL).unwrap();
    let a = r.config.a;
    let d2 = |x, y| r.distances.squared_by_label(x, y);
    assert!((d2("AB", "AC") - (2.0 - 2.0 * a)).abs() <= 1e-12);
    assert!((d2("AC", "CD") - (2.0 - 2.0 * a)).abs() <= 1e-12);
    assert!((d2("AB", "CD") - (4.0 - 4.0 * a)).abs() <= 1e-12);
    assert!((d2("AC", "BD") - (4.0 - 4.0 * a)).abs() <= 1e-12);
    for s in r.side_lengths_sq {
        assert!((s - (2.0 - 2.0 * a * a)).abs() <= 1e-12);
    }
    assert!((r.hyp_expected - (4.0 - 4.0 * a * a).sqrt()).abs() <= 1e-12);
    assert!((r.hyp_actual - (4.0 - 4.0 * a).sqrt()).abs() <= 1e-12);
    assert!((r.contradiction_gap - 0.269626794823087342884722034519).abs() <= 1e-12);
}

#[test]
fn gap_positive_on_dense_gamma_grid() {
    let grid: Vec<f64> = (0..50).map(|k| 0.1 + k as f64 * (4.9 / 49.0)).collect();
    for row in gamma_sweep(&grid).unwrap() {
        assert!(row.contradiction_gap > 1e-6, "gamma {}", row.gamma);
        assert!(row.refuted);
    }
}

#[test]
fn sweep_row_equals_single_run() {
    let row = gamma_sweep(&[1.0]).unwrap()[0];
    let r = run_counterexample(1.0, DEFAULT_PSD_TOL).unwrap();
    assert_eq!(row.lambda_min, r.spectrum.min_eigenvalue);
    assert_eq!(row.witness_value, r.witness_value);
    assert_eq!(row.contradiction_gap, r.contradiction_gap);
    assert_eq!(row.refuted, r.refuted);
}

#[test]
fn sweep_policies_agree() {
    use oakernel::counterexample::gamma_sweep_with;
    let s = gamma_sweep_with(&GRID, DEFAULT_PSD_TOL, Execution::Sequential).unwrap();
    let p = gamma_sweep_with(&GRID, DEFAULT_PSD_TOL, Execution::Parallel).unwrap();
    assert_eq!(s, p);
    assert_eq!(s.iter().map(|r| r.gamma).collect::<Vec<_>>(), GRID.to_vec());
}

#[test]
fn projection_of_counterexample_gram() {
    let r = run_counterexample(1.0, DEFAULT_PSD_TOL).unwrap();
    let clip = psd_project_clip_report(&r.gram_computed).unwrap();
    assert_eq!(clip.clipped_eigenvalues.len(), 1);
    assert!((clip.frobenius_distance - r.spectrum.min_eigenvalue.abs()).abs() <= 1e-9);
}

#[test]
fn min_kernel_random_sets() {
    let mut rng = common::rng(31);
    for _ in 0..20 {
        let size = rng.gen_range(1..=12);
        let lengths: Vec<usize> = (0..size).map(|_| rng.gen_range(1..=50)).collect();
        let v = verify_min_kernel_psd(&lengths, DEFAULT_PSD_TOL).unwrap();
        assert!(v.mismatches.is_empty());
        assert!(v.verdict.min_eigenvalue >= -1e-9);
        assert!(v.psd);
    }
    let v = verify_min_kernel_psd(&[1, 2, 3, 5, 8], DEFAULT_PSD_TOL).unwrap();
    assert!(v.psd);
}

#[test]
fn gram_via_public_tuples_matches_report() {
    let cfg = oakernel::build_square_config(0.5).unwrap();
    let g = oa_gram(&cfg.tuples(), &cfg.base_kernel()).unwrap();
    let r = run_counterexample(0.5, DEFAULT_PSD_TOL).unwrap();
    assert_eq!(g, r.gram_computed);
}
