//! Recursive-descent parser for the formula grammar.
//!
//! Precedence (tightest first): `^`, unary `-`, `* /`, `+ -`; operators of
//! equal precedence associate to the left; parentheses override. The
//! exponent of `^` is a number literal or a parenthesized constant
//! expression, folded at parse time.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{EvalError, Expression, Func, Node};

#[derive(Clone, Debug, PartialEq)]
pub enum ParseError {
    /// Malformed input; `offset` is the byte position in the source text.
    Syntax { offset: usize, message: String },
    /// Identifier that is neither a declared variable nor a function name.
    UnknownIdentifier { offset: usize, name: String },
    /// The exponent of `^` references a variable.
    NonConstantExponent { offset: usize },
    /// A numeric literal that does not fit a finite f64.
    InvalidNumber { offset: usize },
    /// Evaluation of a constant exponent failed (e.g. `x^(1/0)`).
    BadConstantExponent { offset: usize, source: EvalError },
    /// The variable list itself is invalid (duplicate or malformed name).
    InvalidVariable { name: String, reason: &'static str },
}

impl ParseError {
    /// Byte offset of the error in the source, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NonConstantExponent { offset }
            | ParseError::InvalidNumber { offset }
            | ParseError::BadConstantExponent { offset, .. } => Some(*offset),
            ParseError::InvalidVariable { .. } => None,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, message } => {
                write!(f, "syntax error at offset {offset}: {message}")
            }
            ParseError::UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{name}` at offset {offset}")
            }
            ParseError::NonConstantExponent { offset } => {
                write!(f, "non-constant exponent at offset {offset}")
            }
            ParseError::InvalidNumber { offset } => {
                write!(f, "invalid numeric literal at offset {offset}")
            }
            ParseError::BadConstantExponent { offset, source } => {
                write!(f, "constant exponent at offset {offset} failed to evaluate: {source}")
            }
            ParseError::InvalidVariable { name, reason } => {
                write!(f, "invalid variable `{name}`: {reason}")
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Slash => "`/`".to_string(),
            Tok::Caret => "`^`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_cont(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => toks.push((Tok::Plus, start)),
            b'-' => toks.push((Tok::Minus, start)),
            b'*' => toks.push((Tok::Star, start)),
            b'/' => toks.push((Tok::Slash, start)),
            b'^' => toks.push((Tok::Caret, start)),
            b'(' => toks.push((Tok::LParen, start)),
            b')' => toks.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j + 1;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| ParseError::InvalidNumber { offset: start })?;
                if !value.is_finite() {
                    return Err(ParseError::InvalidNumber { offset: start });
                }
                toks.push((Tok::Num(value), start));
                continue;
            }
            _ if is_ident_start(c) => {
                i += 1;
                while i < bytes.len() && is_ident_cont(bytes[i]) {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", &text[start..start + 1]),
                })
            }
        }
        i += 1;
    }
    toks.push((Tok::End, text.len()));
    Ok(toks)
}

pub(super) fn parse<S: AsRef<str>>(
    text: &str,
    variables: &[S],
) -> Result<Expression, ParseError> {
    let names: Vec<String> = variables.iter().map(|s| s.as_ref().to_string()).collect();
    for (k, name) in names.iter().enumerate() {
        let bytes = name.as_bytes();
        if bytes.is_empty() || !is_ident_start(bytes[0]) || !bytes.iter().all(|&b| is_ident_cont(b))
        {
            return Err(ParseError::InvalidVariable {
                name: name.clone(),
                reason: "not a valid identifier",
            });
        }
        if names[..k].contains(name) {
            return Err(ParseError::InvalidVariable {
                name: name.clone(),
                reason: "duplicate variable name",
            });
        }
    }
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".to_string(),
        });
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        names: &names,
    };
    let root = p.expr()?;
    let (tok, offset) = p.peek();
    if *tok != Tok::End {
        return Err(ParseError::Syntax {
            offset,
            message: format!("expected operator or end of input, found {}", tok.describe()),
        });
    }
    Ok(Expression::from_parts(root, names))
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> (&Tok, usize) {
        let (t, o) = &self.toks[self.pos];
        (t, *o)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let out = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        out
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize, ParseError> {
        let (tok, offset) = self.bump();
        if tok == want {
            Ok(offset)
        } else {
            Err(ParseError::Syntax {
                offset,
                message: format!("expected {what}, found {}", tok.describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if *self.peek().0 == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let mut base = self.atom()?;
        while *self.peek().0 == Tok::Caret {
            self.bump();
            let e = self.exponent()?;
            base = Node::Pow(Box::new(base), e);
        }
        Ok(base)
    }

    /// A number literal, or a parenthesized expression that folds to a
    /// constant. Anything mentioning a variable is a non-constant exponent.
    fn exponent(&mut self) -> Result<f64, ParseError> {
        let (tok, offset) = self.peek();
        match tok {
            Tok::Num(v) => {
                let v = *v;
                self.bump();
                Ok(v)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)` closing the exponent")?;
                if contains_var(&inner) {
                    return Err(ParseError::NonConstantExponent { offset });
                }
                let value = super::eval_node::<f64>(&inner, &[])
                    .map_err(|source| ParseError::BadConstantExponent { offset, source })?;
                if !value.is_finite() {
                    return Err(ParseError::BadConstantExponent {
                        offset,
                        source: EvalError::DivisionByZero,
                    });
                }
                Ok(value)
            }
            Tok::Ident(_) => Err(ParseError::NonConstantExponent { offset }),
            _ => Err(ParseError::Syntax {
                offset,
                message: format!(
                    "expected a number or parenthesized constant after `^`, found {}",
                    tok.describe()
                ),
            }),
        }
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek().0 == Tok::LParen {
                    if let Some(func) = Func::from_name(&name) {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)` closing the function argument")?;
                        return Ok(Node::Func(func, Box::new(arg)));
                    }
                }
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Node::Var(i)),
                    None => Err(ParseError::UnknownIdentifier { offset, name }),
                }
            }
            other => Err(ParseError::Syntax {
                offset,
                message: format!("expected a value, found {}", other.describe()),
            }),
        }
    }
}

fn contains_var(node: &Node) -> bool {
    match node {
        Node::Const(_) => false,
        Node::Var(_) => true,
        Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => contains_var(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            contains_var(a) || contains_var(b)
        }
    }
}
