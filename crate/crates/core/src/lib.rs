//! Core library for finding and classifying critical points of
//! equality-constrained minimization problems
//!
//! ```text
//! minimize  f(x)
//! subject to  g(x) = 0,    g: R^n -> R^m,  1 <= m < n
//! ```
//!
//! The pipeline is:
//!
//! 1. [`expr`] parses objective and constraint formulas and differentiates
//!    them exactly with forward-mode duals.
//! 2. [`kkt`] assembles the stationarity system (gradient of the Lagrangian
//!    plus feasibility) and solves it by damped Newton from a deterministic
//!    low-discrepancy multistart, deduplicating the converged roots.
//! 3. [`classify`] applies the second-order test at each critical point:
//!    project the Lagrangian Hessian onto the constraint tangent space and
//!    read the verdict off the eigenvalue signs.
//! 4. [`corpus`] carries a small set of built-in problems with known critical
//!    points, multipliers and verdicts, used as executable fixtures.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature and enable `libm` instead.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("lmm-core needs either the `std` (default) or the `libm` feature");

pub mod classify;
pub mod corpus;
pub mod expr;
pub mod kkt;
pub mod linalg;

pub use classify::{
    classify, classify_with_basis, lagrangian_hessian, ClassificationDetail,
    ClassificationReport, ClassifyError, SpecializedCheck, SpecializedClaim, Verdict,
    DEFAULT_CLASSIFY_TOL,
};
pub use corpus::{corpus_case, corpus_cases, CaseReport, CheckResult, CorpusCase, ExpectedPoint};
pub use expr::{EvalError, Expression, ParseError};
pub use kkt::{
    find_critical_points, kkt_jacobian, kkt_residual, solve_from, CriticalPoint, DivergenceReason,
    FuncId, MultistartResult, Problem, ProblemError, ProblemEvalError, SolveOutcome, SolverConfig,
};
pub use linalg::{determinant, null_space_basis, solve_linear, sym_eigenvalues, LinalgError, Matrix};

/// Float math entry points that work both with `std` and with `libm`.
///
/// Only the functions the expression evaluator and the solvers actually need.
/// `powi` is implemented here by binary exponentiation so that both backends
/// produce bit-identical results.
pub(crate) mod fmath {
    #[cfg(feature = "std")]
    mod backend {
        pub fn sin(x: f64) -> f64 {
            x.sin()
        }
        pub fn cos(x: f64) -> f64 {
            x.cos()
        }
        pub fn exp(x: f64) -> f64 {
            x.exp()
        }
        pub fn ln(x: f64) -> f64 {
            x.ln()
        }
        pub fn sqrt(x: f64) -> f64 {
            x.sqrt()
        }
        pub fn powf(x: f64, y: f64) -> f64 {
            x.powf(y)
        }
    }

    #[cfg(all(not(feature = "std"), feature = "libm"))]
    mod backend {
        pub fn sin(x: f64) -> f64 {
            libm::sin(x)
        }
        pub fn cos(x: f64) -> f64 {
            libm::cos(x)
        }
        pub fn exp(x: f64) -> f64 {
            libm::exp(x)
        }
        pub fn ln(x: f64) -> f64 {
            libm::log(x)
        }
        pub fn sqrt(x: f64) -> f64 {
            libm::sqrt(x)
        }
        pub fn powf(x: f64, y: f64) -> f64 {
            libm::pow(x, y)
        }
    }

    pub use backend::{cos, exp, ln, powf, sin, sqrt};

    pub fn abs(x: f64) -> f64 {
        f64::from_bits(x.to_bits() & !(1u64 << 63))
    }

    /// Integer power by binary exponentiation. `powi(0.0, k)` with `k < 0`
    /// yields `inf`; callers guard that case.
    pub fn powi(x: f64, k: i32) -> f64 {
        let mag = powi_unsigned(x, k.unsigned_abs());
        if k < 0 {
            1.0 / mag
        } else {
            mag
        }
    }

    fn powi_unsigned(mut x: f64, mut k: u32) -> f64 {
        let mut acc = 1.0;
        while k > 0 {
            if k & 1 == 1 {
                acc *= x;
            }
            x *= x;
            k >>= 1;
        }
        acc
    }
}
