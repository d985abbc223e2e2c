//! Arbitrary-precision ball arithmetic.
//!
//! Every value is a midpoint with a rigorous radius; every operation returns
//! a ball that contains all possible exact results for inputs drawn from
//! the argument balls. Precision is requested in decimal digits and carried
//! on each value; binary operations work at the larger of the two.

mod complex;
mod elem;
mod gamma;
mod mag;
mod real;

pub use complex::BallComplex;
pub use elem::{const_ln2, const_pi, Elem};
pub use mag::Mag;
pub use real::{prec_bits, BallReal, MIN_PREC};

pub(crate) use real::rational_to_decimal_trunc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BallError {
    #[error("possible division by zero")]
    DivisionByZero,
    #[error("exponent range overflow in {0}")]
    Overflow(&'static str),
    #[error("{func}: argument {ball} is outside the domain")]
    Domain { func: &'static str, ball: String },
    #[error("Gamma pole: argument {0} meets a nonpositive integer")]
    GammaPole(String),
}

/// Binary operations accepted by [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(a: &BallReal, b: &BallReal, op: ArithOp) -> Result<BallReal, BallError> {
    match op {
        ArithOp::Add => Ok(a.add(b)),
        ArithOp::Sub => Ok(a.sub(b)),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => a.div(b),
    }
}

pub fn arith_complex(
    a: &BallComplex,
    b: &BallComplex,
    op: ArithOp,
) -> Result<BallComplex, BallError> {
    match op {
        ArithOp::Add => Ok(a.add(b)),
        ArithOp::Sub => Ok(a.sub(b)),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => a.div(b),
    }
}
