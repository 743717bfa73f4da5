//! Parsed scalar formulas over named variables, with exact forward-mode
//! differentiation and a finite-difference oracle.
//!
//! The grammar supports `+ - * / ^`, unary minus, parentheses and the
//! functions `sin cos exp ln sqrt`. Exponents of `^` must be constants
//! (a number literal, or a parenthesized constant expression which is folded
//! at parse time), so differentiation never needs logarithms of negative
//! bases.

mod fd;
mod parse;
mod scalar;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Matrix;
use scalar::{Dual, Dual2, Scalar};

pub use fd::{FD_GRADIENT_STEP, FD_HESSIAN_STEP};
pub use parse::ParseError;

/// Built-in unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// One node of the expression tree. The `^` exponent is stored as a plain
/// `f64`: the parser folds constant exponent subtrees and rejects anything
/// that mentions a variable.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    Func(Func, Box<Node>),
}

/// Domain error raised while evaluating an expression (or one of its
/// derivatives) at a point. The payload identifies the offending operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalError {
    DivisionByZero,
    LnDomain(f64),
    SqrtDomain(f64),
    PowDomain { base: f64, exponent: f64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::DivisionByZero => write!(f, "division by zero"),
            EvalError::LnDomain(x) => write!(f, "ln of non-positive argument {x}"),
            EvalError::SqrtDomain(x) => write!(f, "sqrt of negative argument {x}"),
            EvalError::PowDomain { base, exponent } => {
                write!(f, "power {base}^{exponent} outside the real domain")
            }
        }
    }
}

impl core::error::Error for EvalError {}

/// A parsed formula over an ordered list of named variables.
///
/// Expressions are immutable after parsing and all operations are pure, so
/// they can be shared freely across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    root: Node,
    variables: Vec<String>,
}

impl Expression {
    /// Parses `text` against the given variable names. Variable indices in
    /// the resulting tree follow the supplied order.
    pub fn parse<S: AsRef<str>>(text: &str, variables: &[S]) -> Result<Expression, ParseError> {
        parse::parse(text, variables)
    }

    /// Number of variables this expression may reference.
    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    /// The variable names, in index order.
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    fn check_point(&self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.arity(),
            "point has {} coordinates but the expression has arity {}",
            x.len(),
            self.arity()
        );
    }

    /// Value of the formula at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.check_point(x);
        eval_node(&self.root, x)
    }

    /// Exact gradient at `x` (one forward dual pass per coordinate).
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.check_point(x);
        let n = self.arity();
        let mut grad = Vec::with_capacity(n);
        let mut seeded: Vec<Dual> = x.iter().map(|&v| Dual::variable(v, false)).collect();
        for k in 0..n {
            seeded[k].d = 1.0;
            grad.push(eval_node(&self.root, &seeded)?.d);
            seeded[k].d = 0.0;
        }
        Ok(grad)
    }

    /// Exact Hessian at `x`. The returned matrix is symmetric by
    /// construction: the upper triangle is computed with second-order duals
    /// and mirrored bit-for-bit.
    pub fn hessian(&self, x: &[f64]) -> Result<Matrix, EvalError> {
        self.check_point(x);
        let n = self.arity();
        let mut h = Matrix::zeros(n, n);
        let mut seeded: Vec<Dual2> = x.iter().map(|&v| Dual2::variable(v, false, false)).collect();
        for i in 0..n {
            for j in i..n {
                seeded[i].di = 1.0;
                seeded[j].dj = 1.0;
                let out = eval_node(&self.root, &seeded)?;
                h[(i, j)] = out.dij;
                h[(j, i)] = out.dij;
                seeded[i].di = 0.0;
                seeded[j].dj = 0.0;
            }
        }
        Ok(h)
    }

    /// Central-difference gradient with per-coordinate step `h * (1 + |x_i|)`.
    /// Exists as an independent oracle for the exact derivatives.
    pub fn fd_gradient(&self, x: &[f64], h: f64) -> Result<Vec<f64>, EvalError> {
        self.check_point(x);
        fd::fd_gradient(self, x, h)
    }

    /// Central-difference Hessian with per-coordinate step `h * (1 + |x_i|)`.
    pub fn fd_hessian(&self, x: &[f64], h: f64) -> Result<Matrix, EvalError> {
        self.check_point(x);
        fd::fd_hessian(self, x, h)
    }

    pub(crate) fn from_parts(root: Node, variables: Vec<String>) -> Expression {
        Expression { root, variables }
    }
}

fn eval_node<T: Scalar>(node: &Node, x: &[T]) -> Result<T, EvalError> {
    Ok(match node {
        Node::Const(c) => T::from_const(*c),
        Node::Var(i) => x[*i],
        Node::Neg(a) => eval_node(a, x)?.neg(),
        Node::Add(a, b) => eval_node(a, x)?.add(eval_node(b, x)?),
        Node::Sub(a, b) => eval_node(a, x)?.sub(eval_node(b, x)?),
        Node::Mul(a, b) => eval_node(a, x)?.mul(eval_node(b, x)?),
        Node::Div(a, b) => eval_node(a, x)?.div(eval_node(b, x)?)?,
        Node::Pow(a, e) => eval_node(a, x)?.pow(*e)?,
        Node::Func(f, a) => {
            let u = eval_node(a, x)?;
            match f {
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Exp => u.exp(),
                Func::Ln => u.ln()?,
                Func::Sqrt => u.sqrt()?,
            }
        }
    })
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Canonical fully-parenthesized form; names are substituted by the
        // Expression wrapper, so bare Var prints a positional placeholder.
        match self {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(i) => write!(f, "${i}"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Add(a, b) => write!(f, "({a}+{b})"),
            Node::Sub(a, b) => write!(f, "({a}-{b})"),
            Node::Mul(a, b) => write!(f, "({a}*{b})"),
            Node::Div(a, b) => write!(f, "({a}/{b})"),
            Node::Pow(a, e) => write!(f, "({a}^({e}))"),
            Node::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl fmt::Display for Expression {
    /// Canonical fully-parenthesized serialization. Parsing it back against
    /// the same variable list reproduces the tree exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rec(node: &Node, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match node {
                Node::Const(c) => write!(f, "{c}"),
                Node::Var(i) => write!(f, "{}", names[*i]),
                Node::Neg(a) => {
                    write!(f, "(-")?;
                    rec(a, names, f)?;
                    write!(f, ")")
                }
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    let sym = match node {
                        Node::Add(..) => '+',
                        Node::Sub(..) => '-',
                        Node::Mul(..) => '*',
                        _ => '/',
                    };
                    write!(f, "(")?;
                    rec(a, names, f)?;
                    write!(f, "{sym}")?;
                    rec(b, names, f)?;
                    write!(f, ")")
                }
                Node::Pow(a, e) => {
                    write!(f, "(")?;
                    rec(a, names, f)?;
                    write!(f, "^({e}))")
                }
                Node::Func(func, a) => {
                    write!(f, "{}(", func.name())?;
                    rec(a, names, f)?;
                    write!(f, ")")
                }
            }
        }
        rec(&self.root, &self.variables, f)
    }
}
