//! Rigorous evaluators for Dirichlet beta and zeta values, their Euler
//! products, and the product over odd integers, plus the closed forms they
//! are compared against.
//!
//! Every evaluator returns an [`Enclosure`]: a ball that contains the exact
//! value, the bound used for the omitted tail, and the number of terms
//! (pairs, primes) actually multiplied or summed.

mod closed;
mod product;
mod series;

pub use closed::{beta_closed, odd_product_closed, odd_product_closed_complex, zeta_closed_even};
pub use product::{pairs_for_target, paired_product, prime_product, PrimeFactor};
pub use series::{alternating_sum, positive_sum_integral, power_sum_em, PowerTerm};

use num_rational::BigRational;
use thiserror::Error;

use crate::exactseq::{odd_primes, SeqError};
use crate::mpball::{BallError, BallReal, Mag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("{0}")]
    Invalid(String),
}

/// Constant factor of a term: exact when it came from rational data.
#[derive(Clone, Debug)]
pub enum Coef {
    Exact(BigRational),
    Ball(BallReal),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Technique {
    AlternatingNextTerm,
    IntegralComparison,
    EulerMaclaurin,
    PairedProduct,
    StirlingRemainder,
}

impl Technique {
    pub fn name(self) -> &'static str {
        match self {
            Technique::AlternatingNextTerm => "alternating-next-term",
            Technique::IntegralComparison => "integral-comparison",
            Technique::EulerMaclaurin => "euler-maclaurin",
            Technique::PairedProduct => "paired-product",
            Technique::StirlingRemainder => "stirling-remainder",
        }
    }
}

/// Upper bound on the omitted tail (for products: on `|log tail|`).
#[derive(Clone, Debug)]
pub struct TailBound {
    pub technique: Technique,
    pub value: BallReal,
}

impl TailBound {
    pub fn new(technique: Technique, bound: Mag, prec: u32) -> Self {
        TailBound {
            technique,
            value: BallReal::from_rational(&bound.to_rational(), prec),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Enclosure {
    pub value: BallReal,
    pub tail: TailBound,
    /// Terms summed, pairs multiplied, or primes used.
    pub terms: u64,
    /// The radius exceeds `10^-prec` relative to the value: the term budget
    /// was too small for the requested precision.
    pub capped: bool,
}

impl Enclosure {
    pub fn new(value: BallReal, tail: TailBound, terms: u64, prec: u32) -> Self {
        let scale = value.mid_mag().log10_approx().max(0.0);
        let capped = value.rad().log10_approx() > scale - f64::from(prec);
        Enclosure {
            value,
            tail,
            terms,
            capped,
        }
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<(), AnalyticError> {
    if cond {
        Ok(())
    } else {
        Err(AnalyticError::Invalid(msg.into()))
    }
}

/// `beta(s) = sum_{m>=0} (-1)^m / (2m+1)^s` from `max_terms` terms.
pub fn beta_series(s: u32, prec: u32, max_terms: u64) -> Result<Enclosure, AnalyticError> {
    require(s >= 1, "beta series needs s >= 1")?;
    alternating_sum(&PowerTerm::simple(1, true, 2, 1, s), 0, max_terms, prec)
}

/// `prod_{odd p <= prime_limit} p^s / (p^s - chi4(p))`.
pub fn beta_euler_product(s: u32, prec: u32, prime_limit: u64) -> Result<Enclosure, AnalyticError> {
    require(s >= 2, "beta Euler product needs s >= 2")?;
    require(prime_limit >= 3, "prime limit must be at least 3")?;
    let f = PrimeFactor {
        coef: BigRational::from_integer((-1).into()),
        chi: true,
        s,
        reciprocal: true,
    };
    let primes = odd_primes(prime_limit);
    prime_product(&f, primes.as_slice(), prime_limit, prec)
}

fn check_even(two_m: u32) -> Result<(), AnalyticError> {
    require(
        two_m >= 2 && two_m.is_multiple_of(2),
        format!("zeta evaluator needs an even argument >= 2, got {two_m}"),
    )
}

/// `zeta(2m)` from `max_terms` terms with the plain integral tail.
pub fn zeta_even_series(two_m: u32, prec: u32, max_terms: u64) -> Result<Enclosure, AnalyticError> {
    check_even(two_m)?;
    positive_sum_integral(&PowerTerm::simple(1, false, 1, 0, two_m), 1, max_terms, prec)
}

/// `zeta(2m)` with an Euler-Maclaurin tail; full precision at any `prec`.
pub fn zeta_even_series_em(two_m: u32, prec: u32) -> Result<Enclosure, AnalyticError> {
    check_even(two_m)?;
    power_sum_em(&PowerTerm::simple(1, false, 1, 0, two_m), 1, prec)
}

/// `prod_{p <= prime_limit} (1 - p^-2m)^-1`, the prime 2 included.
pub fn zeta_euler_product(two_m: u32, prec: u32, prime_limit: u64) -> Result<Enclosure, AnalyticError> {
    check_even(two_m)?;
    require(prime_limit >= 2, "prime limit must be at least 2")?;
    let f = PrimeFactor {
        coef: BigRational::from_integer((-1).into()),
        chi: false,
        s: two_m,
        reciprocal: true,
    };
    let primes = odd_primes(prime_limit);
    let mut e = prime_product(&f, primes.as_slice(), prime_limit, prec + 2)?;
    // factor for p = 2: 4^m / (4^m - 1)
    let four_m = num_traits::pow(num_bigint::BigInt::from(2), two_m as usize);
    let two = BigRational::new(four_m.clone(), four_m - 1u32);
    e.value = e.value.mul(&BallReal::from_rational(&two, prec + 2)).with_prec(prec);
    e.terms += 1;
    Ok(e)
}

/// `prod_{k>=1} (1 - (-1)^k / (2k+1)^s)` from `max_pairs` pairs.
pub fn odd_product_direct(s: u32, prec: u32, max_pairs: u64) -> Result<Enclosure, AnalyticError> {
    require(s >= 1, "product needs s >= 1")?;
    paired_product(&PowerTerm::simple(-1, true, 2, 1, s), 1, max_pairs, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpball::const_pi;

    #[test]
    fn beta_series_two_terms() {
        let e = beta_series(3, 20, 2).unwrap();
        let mid = e.value.mid_f64();
        assert!((mid - (1.0 - 1.0 / 27.0)).abs() < 1e-12);
        assert!(e.value.rad().to_f64() >= 0.008);
        assert_eq!(e.tail.technique, Technique::AlternatingNextTerm);
        assert!(e.capped);
    }

    #[test]
    fn leibniz_million_terms() {
        let e = beta_series(1, 12, 1_000_000).unwrap();
        assert!(e.value.overlaps(&const_pi(20).mul_2exp(-2)));
        assert!(e.value.rad().to_f64() <= 1e-6);
    }

    #[test]
    fn zeta_series_two_terms() {
        let e = zeta_even_series(2, 20, 2).unwrap();
        assert!((e.value.mid_f64() - 1.25).abs() < 1e-12);
        assert!(e.value.rad().to_f64() >= 0.5);
    }

    #[test]
    fn zeta_product_at_four() {
        let e = zeta_euler_product(4, 20, 1000).unwrap();
        let want = const_pi(30).pow_i64(4).unwrap().div_i64(90).unwrap();
        assert!(e.value.overlaps(&want));
        assert!(e.value.rad().to_f64() <= 1e-8);
    }

    #[test]
    fn rejected_arguments() {
        assert!(beta_euler_product(1, 20, 100).is_err());
        assert!(beta_euler_product(3, 20, 2).is_err());
        assert!(zeta_even_series(3, 20, 10).is_err());
        assert!(zeta_euler_product(5, 20, 10).is_err());
    }
}
