//! Optimal assignment kernel on tuples, with the spectral and metric
//! diagnostics needed to show that it is not positive definite in general.
//!
//! The kernel between two tuples is the best total base-kernel value over
//! injective matchings of the shorter tuple into the longer one
//! ([`oa_kernel::oa_eval`]). The [`counterexample`] module builds a six-tuple
//! Gram matrix over the corners of a square with an RBF base kernel whose
//! smallest eigenvalue is negative for every `gamma > 0`, and the singleton
//! base set for which the kernel reduces to `min(|x|, |y|)` and is PSD.
//!
//! Gram assembly and gamma sweeps run on rayon when the `parallel` feature
//! (on by default) is enabled; see [`Execution`].

pub mod base_kernel;
pub mod counterexample;
pub mod error;
mod exec;
pub mod hungarian;
pub mod io;
pub mod matrix;
pub mod oa_kernel;
pub mod spectral;

pub use base_kernel::{eval_base, validate_base, BaseKernelSpec, Element, Point, ValidationReport};
pub use counterexample::{
    build_square_config, expected_gram_closed_form, gamma_sweep, run_counterexample,
    verify_min_kernel_psd, CounterexampleReport, SquareConfig, SweepRow,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use hungarian::{brute_force_assignment, solve_max_assignment, Assignment, ProfitMatrix};
pub use matrix::{GramMatrix, LabeledMatrix, SymmetricMatrix};
pub use oa_kernel::{oa_eval, oa_gram, oa_gram_with, TupleDataset, TupleObject};
pub use spectral::{
    distances_from_gram, jacobi_eigen, psd_check, psd_project_clip, quadratic_form, DistanceMatrix,
    PsdVerdict, Spectrum,
};
