//! Closed forms: beta at odd integers, zeta at even integers, and the
//! Gamma-function product for `prod_k (1 - (-1)^k / (2k+1)^s)`.

use num_rational::BigRational;
use num_traits::Signed;

use super::AnalyticError;
use crate::exactseq::{bernoulli_hist, euler_numbers, factorial};
use crate::mpball::{const_pi, BallComplex, BallReal};

/// `|E_{2n}| (pi/2)^{2n+1} / (2 (2n)!)` for `s = 2n + 1`.
pub fn beta_closed(s: u32, prec: u32) -> Result<BallReal, AnalyticError> {
    if s == 0 || s.is_multiple_of(2) {
        return Err(AnalyticError::Invalid(format!(
            "no closed form implemented for beta({s})"
        )));
    }
    let n = ((s - 1) / 2) as usize;
    let wprec = prec + 4;
    let e = euler_numbers(n)[n].abs();
    let coef = BigRational::new(e, factorial(2 * n as u64) * 2u32);
    let half_pi = const_pi(wprec).mul_2exp(-1);
    Ok(half_pi
        .pow_i64(i64::from(s))?
        .mul(&BallReal::from_rational(&coef, wprec))
        .with_prec(prec))
}

/// `(2 pi)^{2m} B_m / (2 (2m)!)` with historical `B_m`.
pub fn zeta_closed_even(two_m: u32, prec: u32) -> Result<BallReal, AnalyticError> {
    if two_m < 2 || two_m % 2 == 1 {
        return Err(AnalyticError::Invalid(format!(
            "zeta closed form needs an even argument >= 2, got {two_m}"
        )));
    }
    let m = u64::from(two_m / 2);
    let wprec = prec + 4;
    let b = bernoulli_hist(m)?;
    let coef = b / BigRational::from_integer(factorial(2 * m) * 2u32);
    let two_pi = const_pi(wprec).mul_2exp(1);
    Ok(two_pi
        .pow_i64(i64::from(two_m))?
        .mul(&BallReal::from_rational(&coef, wprec))
        .with_prec(prec))
}

/// Roots of `z^s = 1` (`minus = false`) or `z^s = -1`, as complex balls.
fn roots(s: u32, minus: bool, prec: u32) -> Result<Vec<BallComplex>, AnalyticError> {
    let pi = const_pi(prec);
    (0..s)
        .map(|j| {
            let num = if minus { 2 * j + 1 } else { 2 * j };
            let theta = pi
                .mul_i64(i64::from(num))
                .div_i64(i64::from(s))?;
            let (sin, cos) = theta.sin_cos()?;
            Ok(BallComplex::new(cos, sin))
        })
        .collect()
}

/// Complex enclosure of
/// `prod_j Gamma(5/4) Gamma(3/4) / (Gamma(1 + (1 - z_j)/4) Gamma((3 - w_j)/4))`
/// with `z_j` the `s`-th roots of 1 and `w_j` those of -1. The imaginary
/// part should contain zero.
pub fn odd_product_closed_complex(s: u32, prec: u32) -> Result<BallComplex, AnalyticError> {
    if s == 0 {
        return Err(AnalyticError::Invalid("exponent must be at least 1".into()));
    }
    let wprec = prec + 6 + s.ilog2() * 2;
    let one = BallReal::one(wprec);
    let quarter = |z: &BallComplex| z.mul_2exp(-2);
    let zs = roots(s, false, wprec)?;
    let ws = roots(s, true, wprec)?;

    let mut den_args = Vec::with_capacity(2 * s as usize);
    for (z, w) in zs.iter().zip(&ws) {
        // 1 + (1 - z)/4 and (3 - w)/4
        let a = quarter(&z.neg().add_real(&one)).add_real(&one);
        let b = quarter(&w.neg().add_real(&BallReal::from_i64(3, wprec)));
        den_args.push(a);
        den_args.push(b);
    }
    // the Gamma-limit formula needs numerator and denominator arguments to
    // have equal sums: 2s on both sides since each set of roots sums to 0
    let total = den_args
        .iter()
        .fold(BallComplex::from_real(BallReal::zero(wprec)), |acc, z| acc.add(z));
    if !total.re.contains_int(2 * i64::from(s)) || !total.im.contains_int(0) {
        return Err(AnalyticError::Invalid(
            "argument shifts of the Gamma quotient do not balance".into(),
        ));
    }

    let g54 = BallReal::from_rational(&BigRational::new(5.into(), 4.into()), wprec).gamma()?;
    let g34 = BallReal::from_rational(&BigRational::new(3.into(), 4.into()), wprec).gamma()?;
    let num = g54.mul(&g34).pow_i64(i64::from(s))?;
    let mut den = BallComplex::from_real(BallReal::one(wprec));
    for g in den_args.iter().map(|z| z.gamma()) {
        den = den.mul(&g?);
    }
    let out = BallComplex::from_real(num).div(&den)?;
    Ok(out.with_prec(prec))
}

pub fn odd_product_closed(s: u32, prec: u32) -> Result<BallReal, AnalyticError> {
    let z = odd_product_closed_complex(s, prec)?;
    if !z.im.contains_zero() {
        return Err(AnalyticError::Invalid(format!(
            "imaginary part {} of the Gamma quotient excludes zero",
            z.im
        )));
    }
    Ok(z.re)
}
