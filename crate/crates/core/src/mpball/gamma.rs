//! Gamma function on real and complex balls.
//!
//! The argument is shifted right until its real part exceeds a threshold
//! `W` proportional to the working precision, where the Stirling series for
//! `ln Gamma` converges fast enough; the shift is undone by dividing by the
//! rising factorial. Arguments with real part below 1/2 go through the
//! reflection formula first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::complex::BallComplex;
use super::elem::const_pi;
use super::mag::Mag;
use super::real::{prec_bits, BallReal};
use super::BallError;
use crate::exactseq::bernoulli_table;

/// True when the real interval of `x` contains an integer `<= 0`.
fn meets_nonpositive_integer(x: &BallReal) -> bool {
    let lo = x.lower_rational();
    if lo.is_positive() {
        return false;
    }
    let hi = x.upper_rational().floor().to_integer().min(BigInt::zero());
    let first = lo.ceil().to_integer();
    first <= hi
}

fn half(prec: u32) -> BallReal {
    BallReal::one(prec).mul_2exp(-1)
}

impl BallReal {
    pub fn gamma(&self) -> Result<BallReal, BallError> {
        if meets_nonpositive_integer(self) {
            return Err(BallError::GammaPole(self.to_string()));
        }
        Ok(BallComplex::from_real(self.clone()).gamma()?.re)
    }
}

impl BallComplex {
    pub fn gamma(&self) -> Result<BallComplex, BallError> {
        if self.im.contains_zero() && meets_nonpositive_integer(&self.re) {
            return Err(BallError::GammaPole(self.to_string()));
        }
        let prec = self.prec();
        if self.re.mid_f64() < 0.5 {
            // Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
            let wprec = prec + 4;
            let z = self.with_prec(wprec);
            let pi = const_pi(wprec);
            let s = z.mul_real(&pi).sin()?;
            let one_minus = z.neg().add_real(&BallReal::one(wprec));
            let g = one_minus.gamma()?;
            let den = s.mul(&g);
            let num = BallComplex::from_real(pi);
            return match num.div(&den) {
                Ok(v) => Ok(v.with_prec(prec)),
                Err(BallError::DivisionByZero) => Err(BallError::GammaPole(self.to_string())),
                Err(e) => Err(e),
            };
        }
        stirling_shifted(self, prec)
    }
}

fn stirling_shifted(z: &BallComplex, prec: u32) -> Result<BallComplex, BallError> {
    let bits = prec_bits(prec);
    let threshold = (bits / 4 + 8) as f64;
    let re = z.re.mid_f64();
    let im = z.im.mid_f64().abs();
    if !re.is_finite() || re.abs() > 1e15 || im > 1e15 {
        return Err(BallError::Overflow("gamma"));
    }
    let shift = if re >= threshold {
        0
    } else {
        (threshold - re).ceil() as u64
    };
    // absolute error in ln Gamma becomes relative error in Gamma; keep
    // enough extra digits for its size
    let size = (re.abs() + shift as f64 + im + 2.0).max(2.0);
    let guard = ((size * size.ln()).log10().ceil().max(0.0) as u32) + 6;
    let wprec = prec + guard;
    let wbits = prec_bits(wprec) as i64;

    let z = z.with_prec(wprec);
    let mut w = z.clone();
    let mut rising = BallComplex::from_real(BallReal::one(wprec));
    for _ in 0..shift {
        rising = rising.mul(&w);
        w = w.add_real(&BallReal::one(wprec));
    }

    let lg = ln_gamma_stirling(&w, wbits)?;
    let g = lg.exp()?;
    let out = if shift == 0 {
        g
    } else {
        match g.div(&rising) {
            Ok(v) => v,
            Err(BallError::DivisionByZero) => {
                return Err(BallError::GammaPole(z.to_string()));
            }
            Err(e) => return Err(e),
        }
    };
    Ok(out.with_prec(prec))
}

/// Stirling series for `ln Gamma(w)` with `Re w` large, absolute error
/// below `2^-(wbits+4)` plus ball rounding.
fn ln_gamma_stirling(w: &BallComplex, wbits: i64) -> Result<BallComplex, BallError> {
    let wprec = w.prec();
    let re_lo = w.re.mag_lower();
    if re_lo.is_zero() || !w.re.is_positive() {
        return Err(BallError::Domain {
            func: "ln Gamma",
            ball: w.to_string(),
        });
    }
    let im_lo = w.im.mag_lower();
    // |w|^2 from below, |w| from above
    let abs2_lo = re_lo.mul_lower(&re_lo).add_lower(&im_lo.mul_lower(&im_lo));
    let abs_lo = re_lo.max(im_lo);
    let abs_hi = w.re.mag_upper().add(&w.im.mag_upper());
    // sec^2(arg w / 2) = 2|w| / (|w| + Re w)
    let sec2 = abs_hi.mul_2exp(1).div(&abs_hi.add_lower(&re_lo));

    let pi = const_pi(wprec);
    let two_pi = pi.mul_2exp(1);
    let lnw = w.ln()?;
    let mut s = w
        .sub(&BallComplex::from_real(half(wprec)))
        .mul(&lnw)
        .sub(w)
        .add_real(&two_pi.ln()?.mul_2exp(-1));

    let inv = w.recip()?;
    let inv2 = inv.mul(&inv);
    let mut pw = inv;
    let max_k = (2 * wbits).max(16) as usize;
    let target = Mag::pow2(-(wbits + 4));
    let mut k = 1usize;
    let mut table = bernoulli_table(64.min(max_k + 1));
    loop {
        if table.len() < k + 1 {
            table = bernoulli_table((2 * table.len()).min(max_k + 1).max(k + 1));
        }
        let b = &table[k - 1];
        let c = b / BigRational::from_integer(BigInt::from((2 * k) * (2 * k - 1)));
        s = s.add(&pw.mul_real(&BallReal::from_rational(&c, wprec)));
        // remainder after k terms
        let bn = table[k].abs();
        let coef = bn / BigRational::from_integer(BigInt::from((2 * k + 2) * (2 * k + 1)));
        let coef_mag = Mag::from_rational_upper(&coef);
        let rem = coef_mag
            .mul(&Mag::one().div(&abs2_lo).pow_u32(k as u32))
            .mul(&Mag::one().div(&abs_lo))
            .mul(&sec2.pow_u32(k as u32 + 1));
        if rem <= target {
            s.re = s.re.add_error(&rem);
            s.im = s.im.add_error(&rem);
            return Ok(s);
        }
        if k >= max_k {
            return Err(BallError::Overflow("gamma"));
        }
        pw = pw.mul(&inv2);
        k += 1;
    }
}
