//! The `.idn` identity-corpus format: lexer, parser, validator and a
//! canonical printer.
//!
//! A corpus is a list of identities, each with two expression sides, an
//! optional integer parameter range and the expected verdict:
//!
//! ```text
//! identity "leibniz" {
//!   lhs = sum(k, 0..inf, (-1)^k / (2*k + 1));
//!   rhs = pi / 4;
//!   expect = true >= 20 digits;
//! }
//! ```

mod lexer;
mod parser;
mod print;
mod validate;

pub use parser::{parse, parse_expr};
pub use print::{print, print_expr};
pub use validate::{validate_expr, RESERVED};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// 1-based source position; `0:0` for nodes built in code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Expression node. Equality compares structure only, not positions.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(BigInt),
    /// Never produced by the parser; available to code building trees.
    Rat(BigRational),
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// The exponent must be integer-valued.
    Pow(Box<Expr>, Box<Expr>),
    Factorial(Box<Expr>),
    Abs(Box<Expr>),
    Sqrt(Box<Expr>),
    Cosh(Box<Expr>),
    /// Modern Euler number `E_n`.
    Euler(Box<Expr>),
    /// Historical Bernoulli number `B_m = |B_{2m}|`, `m >= 1`.
    BernoulliHist(Box<Expr>),
    /// The nontrivial character mod 4; only under an `odd_primes` index.
    Chi4(Box<Expr>),
    Sum(BigOp),
    Prod(BigOp),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigOp {
    pub var: String,
    pub domain: Domain,
    pub body: Box<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `start..inf`
    From(i64),
    /// `lo..hi`, both ends included.
    Range(i64, i64),
    OddPrimes,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            pos: Pos::default(),
        }
    }

    pub fn at(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn int(n: i64) -> Self {
        Expr::new(ExprKind::Int(n.into()))
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(name.to_string()))
    }

    /// True when `name` occurs free in the expression.
    pub fn mentions(&self, name: &str) -> bool {
        use ExprKind::*;
        match &self.kind {
            Int(_) | Rat(_) | Pi => false,
            Var(v) => v == name,
            Neg(a) | Factorial(a) | Abs(a) | Sqrt(a) | Cosh(a) | Euler(a) | BernoulliHist(a)
            | Chi4(a) => a.mentions(name),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                a.mentions(name) || b.mentions(name)
            }
            Sum(op) | Prod(op) => op.var != name && op.body.mentions(name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

impl Param {
    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Confirmed(u32),
    Refuted,
}

/// Digits required by `expect = true` without an explicit bound.
pub const DEFAULT_MIN_DIGITS: u32 = 8;

#[derive(Clone, Debug)]
pub struct Identity {
    pub id: String,
    pub lhs: Expr,
    pub rhs: Expr,
    pub param: Option<Param>,
    pub expect: Expect,
    pub pos: Pos,
}

impl PartialEq for Identity {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.lhs == other.lhs
            && self.rhs == other.rhs
            && self.param == other.param
            && self.expect == other.expect
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    pub identities: Vec<Identity>,
}

impl Corpus {
    pub fn get(&self, id: &str) -> Option<&Identity> {
        self.identities.iter().find(|i| i.id == id)
    }

    /// The corpus restricted to one identity, or `None` if the id is absent.
    pub fn only(&self, id: &str) -> Option<Corpus> {
        self.get(id).map(|i| Corpus {
            identities: vec![i.clone()],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntax,
    Validation,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical error",
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Validation => "invalid identity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {kind}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ErrorKind,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            kind,
            message: message.into(),
        }
    }
}

/// Source of the shipped corpus.
pub const BUILTIN_CORPUS_SRC: &str = include_str!("../../../../corpus/dilcher_vignat.idn");

/// The shipped corpus, parsed.
pub fn builtin_corpus() -> Corpus {
    parse(BUILTIN_CORPUS_SRC).expect("shipped corpus parses")
}
