//! Approximation of periodic functions by linear summation methods in
//! Orlicz-type sequence spaces.
//!
//! A function is represented by its Fourier coefficients ([`CoeffSeq`]) and
//! measured by the Luxemburg norm `||f||_M` of that coefficient sequence.
//! The crate provides the Orlicz functions and norms, the diagonal summation
//! operators (Fourier, Zygmund, Abel-Poisson, Taylor-Abel-Poisson),
//! ψ-derivatives, moduli of smoothness, K-functionals, majorants and the
//! experiment drivers behind the `smapprox` binary.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod error;
pub mod experiments;
pub mod majorants;
pub mod operators;
pub mod orlicz;
pub mod spectrum;

pub use calculus::{k_functional, modulus, psi_derivative, KFunctional, PsiSequence, SmoothnessQuery};
pub use error::{Error, Result};
pub use majorants::{check_b, check_bs, rate_fit, remark1_check, Majorant, RateExpr, RateReport, Verdict};
pub use operators::{apply, residual, OperatorSpec};
pub use orlicz::{luxemburg_norm, NormValue, OrliczFunction, OrliczKind};
pub use spectrum::{fourier_coeffs, CoeffSeq, PeriodicFunction, SampledFunction, TestFamily};
