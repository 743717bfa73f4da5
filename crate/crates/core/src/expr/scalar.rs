//! Scalar types the expression evaluator is generic over: plain `f64` for
//! values, first-order duals for gradients, second-order duals for Hessians.

use super::EvalError;
use crate::fmath;

/// Arithmetic shared by `f64` and the dual types. Fallible operations return
/// the domain error of the underlying primal computation.
pub(crate) trait Scalar: Copy {
    fn from_const(c: f64) -> Self;

    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn neg(self) -> Self;

    fn div(self, o: Self) -> Result<Self, EvalError>;
    fn pow(self, exponent: f64) -> Result<Self, EvalError>;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Result<Self, EvalError>;
    fn sqrt(self) -> Result<Self, EvalError>;
}

/// Splits x^e into the integer and the real case. Returns value together
/// with the first and second derivative factors d/dx and d^2/dx^2.
fn pow_with_derivs(x: f64, e: f64) -> Result<(f64, f64, f64), EvalError> {
    if fmath::abs(e) <= i32::MAX as f64 && e == (e as i32) as f64 {
        let k = e as i32;
        if x == 0.0 && k < 0 {
            return Err(EvalError::DivisionByZero);
        }
        let value = fmath::powi(x, k);
        let d1 = if k == 0 {
            0.0
        } else {
            k as f64 * fmath::powi(x, k - 1)
        };
        let d2 = if k == 0 || k == 1 {
            0.0
        } else {
            (k as f64) * (k as f64 - 1.0) * fmath::powi(x, k - 2)
        };
        Ok((value, d1, d2))
    } else {
        // Real exponent: only defined for positive bases (and 0 for e > 0).
        if x < 0.0 || (x == 0.0 && e <= 0.0) {
            return Err(EvalError::PowDomain { base: x, exponent: e });
        }
        let value = fmath::powf(x, e);
        if x == 0.0 {
            // e > 0 here; the derivative factors blow up for e < 1 and e < 2.
            let d1 = if e > 1.0 { 0.0 } else { f64::INFINITY };
            let d2 = if e > 2.0 { 0.0 } else { f64::INFINITY };
            return Ok((0.0, d1, d2));
        }
        let d1 = e * fmath::powf(x, e - 1.0);
        let d2 = e * (e - 1.0) * fmath::powf(x, e - 2.0);
        Ok((value, d1, d2))
    }
}

impl Scalar for f64 {
    fn from_const(c: f64) -> Self {
        c
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn neg(self) -> Self {
        -self
    }
    fn div(self, o: Self) -> Result<Self, EvalError> {
        if o == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(self / o)
    }
    fn pow(self, exponent: f64) -> Result<Self, EvalError> {
        pow_with_derivs(self, exponent).map(|(v, _, _)| v)
    }
    fn sin(self) -> Self {
        fmath::sin(self)
    }
    fn cos(self) -> Self {
        fmath::cos(self)
    }
    fn exp(self) -> Self {
        fmath::exp(self)
    }
    fn ln(self) -> Result<Self, EvalError> {
        if self <= 0.0 {
            return Err(EvalError::LnDomain(self));
        }
        Ok(fmath::ln(self))
    }
    fn sqrt(self) -> Result<Self, EvalError> {
        if self < 0.0 {
            return Err(EvalError::SqrtDomain(self));
        }
        Ok(fmath::sqrt(self))
    }
}

/// First-order dual number: value plus one directional derivative.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn variable(v: f64, seeded: bool) -> Self {
        Dual {
            v,
            d: if seeded { 1.0 } else { 0.0 },
        }
    }
}

/// `num / den` that keeps an exactly-zero numerator zero instead of running
/// into 0/0 at removable points (e.g. the derivative of `sqrt(c)` for a
/// constant subtree at the domain boundary).
fn scaled(num: f64, den: f64) -> Result<f64, EvalError> {
    if num == 0.0 {
        return Ok(0.0);
    }
    if den == 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    Ok(num / den)
}

fn chain1(d: f64, factor: f64) -> Result<f64, EvalError> {
    if d == 0.0 {
        return Ok(0.0);
    }
    if factor.is_infinite() {
        return Err(EvalError::DivisionByZero);
    }
    Ok(d * factor)
}

impl Scalar for Dual {
    fn from_const(c: f64) -> Self {
        Dual { v: c, d: 0.0 }
    }
    fn add(self, o: Self) -> Self {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
    fn sub(self, o: Self) -> Self {
        Dual {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
    fn mul(self, o: Self) -> Self {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
    fn neg(self) -> Self {
        Dual {
            v: -self.v,
            d: -self.d,
        }
    }
    fn div(self, o: Self) -> Result<Self, EvalError> {
        if o.v == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let v = self.v / o.v;
        Ok(Dual {
            v,
            d: (self.d - v * o.d) / o.v,
        })
    }
    fn pow(self, exponent: f64) -> Result<Self, EvalError> {
        let (v, d1, _) = pow_with_derivs(self.v, exponent)?;
        Ok(Dual {
            v,
            d: chain1(self.d, d1)?,
        })
    }
    fn sin(self) -> Self {
        Dual {
            v: fmath::sin(self.v),
            d: self.d * fmath::cos(self.v),
        }
    }
    fn cos(self) -> Self {
        Dual {
            v: fmath::cos(self.v),
            d: -self.d * fmath::sin(self.v),
        }
    }
    fn exp(self) -> Self {
        let v = fmath::exp(self.v);
        Dual { v, d: self.d * v }
    }
    fn ln(self) -> Result<Self, EvalError> {
        if self.v <= 0.0 {
            return Err(EvalError::LnDomain(self.v));
        }
        Ok(Dual {
            v: fmath::ln(self.v),
            d: self.d / self.v,
        })
    }
    fn sqrt(self) -> Result<Self, EvalError> {
        if self.v < 0.0 {
            return Err(EvalError::SqrtDomain(self.v));
        }
        let s = fmath::sqrt(self.v);
        Ok(Dual {
            v: s,
            d: scaled(0.5 * self.d, s)?,
        })
    }
}

/// Second-order dual: value, two directional derivatives and the mixed
/// second derivative. Seeding directions i and j and reading `dij` yields
/// one Hessian entry per evaluation pass.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dual2 {
    pub v: f64,
    pub di: f64,
    pub dj: f64,
    pub dij: f64,
}

impl Dual2 {
    pub fn variable(v: f64, seed_i: bool, seed_j: bool) -> Self {
        Dual2 {
            v,
            di: if seed_i { 1.0 } else { 0.0 },
            dj: if seed_j { 1.0 } else { 0.0 },
            dij: 0.0,
        }
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    fn lift(self, v: f64, d1: f64, d2: f64) -> Result<Self, EvalError> {
        let second = if self.di == 0.0 || self.dj == 0.0 {
            0.0
        } else if d2.is_infinite() {
            return Err(EvalError::DivisionByZero);
        } else {
            d2 * self.di * self.dj
        };
        Ok(Dual2 {
            v,
            di: chain1(self.di, d1)?,
            dj: chain1(self.dj, d1)?,
            dij: chain1(self.dij, d1)? + second,
        })
    }
}

impl Scalar for Dual2 {
    fn from_const(c: f64) -> Self {
        Dual2 {
            v: c,
            di: 0.0,
            dj: 0.0,
            dij: 0.0,
        }
    }
    fn add(self, o: Self) -> Self {
        Dual2 {
            v: self.v + o.v,
            di: self.di + o.di,
            dj: self.dj + o.dj,
            dij: self.dij + o.dij,
        }
    }
    fn sub(self, o: Self) -> Self {
        Dual2 {
            v: self.v - o.v,
            di: self.di - o.di,
            dj: self.dj - o.dj,
            dij: self.dij - o.dij,
        }
    }
    fn mul(self, o: Self) -> Self {
        Dual2 {
            v: self.v * o.v,
            di: self.di * o.v + self.v * o.di,
            dj: self.dj * o.v + self.v * o.dj,
            dij: self.dij * o.v + self.di * o.dj + self.dj * o.di + self.v * o.dij,
        }
    }
    fn neg(self) -> Self {
        Dual2 {
            v: -self.v,
            di: -self.di,
            dj: -self.dj,
            dij: -self.dij,
        }
    }
    fn div(self, o: Self) -> Result<Self, EvalError> {
        if o.v == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        // From self = q * o: solve for q's components top down.
        let v = self.v / o.v;
        let di = (self.di - v * o.di) / o.v;
        let dj = (self.dj - v * o.dj) / o.v;
        let dij = (self.dij - di * o.dj - dj * o.di - v * o.dij) / o.v;
        Ok(Dual2 { v, di, dj, dij })
    }
    fn pow(self, exponent: f64) -> Result<Self, EvalError> {
        let (v, d1, d2) = pow_with_derivs(self.v, exponent)?;
        self.lift(v, d1, d2)
    }
    fn sin(self) -> Self {
        let (s, c) = (fmath::sin(self.v), fmath::cos(self.v));
        self.lift(s, c, -s).expect("sin derivatives are finite")
    }
    fn cos(self) -> Self {
        let (s, c) = (fmath::sin(self.v), fmath::cos(self.v));
        self.lift(c, -s, -c).expect("cos derivatives are finite")
    }
    fn exp(self) -> Self {
        let v = fmath::exp(self.v);
        self.lift(v, v, v).expect("exp derivatives are finite")
    }
    fn ln(self) -> Result<Self, EvalError> {
        if self.v <= 0.0 {
            return Err(EvalError::LnDomain(self.v));
        }
        let inv = 1.0 / self.v;
        self.lift(fmath::ln(self.v), inv, -inv * inv)
    }
    fn sqrt(self) -> Result<Self, EvalError> {
        if self.v < 0.0 {
            return Err(EvalError::SqrtDomain(self.v));
        }
        let s = fmath::sqrt(self.v);
        if s == 0.0 {
            // Derivative factors are infinite at 0; only constant-direction
            // duals survive.
            return self.lift(0.0, f64::INFINITY, f64::NEG_INFINITY);
        }
        let d1 = 0.5 / s;
        let d2 = -0.25 / (s * self.v);
        self.lift(s, d1, d2)
    }
}
