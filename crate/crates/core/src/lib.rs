//! Dynamical low-rank approximation in Tucker format.
//!
//! A time-dependent tensor `A(t)`, given directly or as the solution of
//! `Ȧ = F(t, A)`, is tracked on the manifold of fixed Tucker rank. Each Euler
//! step minimizes the defect `‖Ẏ − Ȧ‖` over tangent increments by alternating
//! least squares, with no gauge condition on the factor increments; every
//! factor update is the polar factor of a small matrix, so no inverse of the
//! core Gram matrix is ever formed.
//!
//! ```
//! use dlra_core::integrator::{Derivative, Integrator, IntegratorConfig};
//! use dlra_core::random::{random_tucker, seeded};
//! use dlra_core::TuckerTensor;
//!
//! let mut rng = seeded(0);
//! let y0 = random_tucker(&mut rng, &[8, 7, 6], &[2, 2, 2]);
//! let rhs = |_t: f64, y: &TuckerTensor| Ok(Derivative::Tucker(y.scaled(-1.0)));
//! let mut integrator = Integrator::new(IntegratorConfig::new(1e-2), rhs).unwrap();
//! let (y1, report) = integrator.step(&y0, 0.0).unwrap();
//! assert!(report.relative_defect < 1e-10);
//! assert!(y1.max_gram_deviation() < 1e-12);
//! ```

// NaN must fail range checks, so `!(x <= limit)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod integrator;
pub mod linalg;
pub mod matrix;
pub mod problems;
pub mod random;
pub mod runner;
pub mod tensor;
pub mod tucker;

pub use error::{Error, Result};
pub use integrator::{
    Derivative, Integrator, IntegratorConfig, Regularization, RhsProvider, Scheme, StepReport,
};
pub use matrix::DenseMatrix;
pub use problems::{build_problem, Problem, ProblemKind, ProblemParams};
pub use runner::{run_experiment, RunConfig};
pub use tensor::DenseTensor;
pub use tucker::{RankVector, TuckerTensor};
