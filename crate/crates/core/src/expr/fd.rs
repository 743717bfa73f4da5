//! Central-difference derivative approximations. These exist purely as an
//! independent oracle for the exact forward-mode derivatives; the solver
//! never uses them.

use alloc::vec::Vec;

use super::{EvalError, Expression};
use crate::fmath;
use crate::linalg::Matrix;

/// Default relative step for gradient checks: eps^(1/3), the usual
/// truncation/roundoff compromise for first-order central differences.
pub const FD_GRADIENT_STEP: f64 = 6.055454452393343e-6;

/// Default relative step for Hessian checks: eps^(1/4) = 2^-13.
pub const FD_HESSIAN_STEP: f64 = 1.220703125e-4;

fn steps(x: &[f64], h: f64) -> Vec<f64> {
    x.iter().map(|&xi| h * (1.0 + fmath::abs(xi))).collect()
}

pub(super) fn fd_gradient(e: &Expression, x: &[f64], h: f64) -> Result<Vec<f64>, EvalError> {
    let hs = steps(x, h);
    let mut shifted = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        shifted[i] = x[i] + hs[i];
        let fp = e.eval(&shifted)?;
        shifted[i] = x[i] - hs[i];
        let fm = e.eval(&shifted)?;
        shifted[i] = x[i];
        grad.push((fp - fm) / (2.0 * hs[i]));
    }
    Ok(grad)
}

pub(super) fn fd_hessian(e: &Expression, x: &[f64], h: f64) -> Result<Matrix, EvalError> {
    let n = x.len();
    let hs = steps(x, h);
    let f0 = e.eval(x)?;
    let mut shifted = x.to_vec();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        shifted[i] = x[i] + hs[i];
        let fp = e.eval(&shifted)?;
        shifted[i] = x[i] - hs[i];
        let fm = e.eval(&shifted)?;
        shifted[i] = x[i];
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (hs[i] * hs[i]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut probe = |si: f64, sj: f64| -> Result<f64, EvalError> {
                shifted[i] = x[i] + si * hs[i];
                shifted[j] = x[j] + sj * hs[j];
                let v = e.eval(&shifted);
                shifted[i] = x[i];
                shifted[j] = x[j];
                v
            };
            let v = (probe(1.0, 1.0)? - probe(1.0, -1.0)? - probe(-1.0, 1.0)? + probe(-1.0, -1.0)?)
                / (4.0 * hs[i] * hs[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}
