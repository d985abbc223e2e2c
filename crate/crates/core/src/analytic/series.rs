//! Sums of `c * (+-1)^k / (alpha k + beta)^s` over `k >= start`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{AnalyticError, Coef, Enclosure, TailBound, Technique};
use crate::exactseq::bernoulli_table;
use crate::mpball::{prec_bits, BallReal, Mag};

/// `c * (-1)^k / L(k)^s` (or without the sign) with `L(k) = alpha k + beta`.
#[derive(Clone, Debug)]
pub struct PowerTerm {
    pub coef: Coef,
    pub alternating: bool,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub s: u32,
}

impl PowerTerm {
    /// `(-1)^k / (2k + 1)^s` and friends: integer `L(k) = alpha k + beta`.
    pub fn simple(coef: i64, alternating: bool, alpha: i64, beta: i64, s: u32) -> Self {
        PowerTerm {
            coef: Coef::Exact(BigRational::from_integer(coef.into())),
            alternating,
            alpha: BigRational::from_integer(alpha.into()),
            beta: BigRational::from_integer(beta.into()),
            s,
        }
    }

    pub fn lin(&self, k: &BigInt) -> BigRational {
        &self.alpha * BigRational::from_integer(k.clone()) + &self.beta
    }

    pub fn lin_f64(&self, k: f64) -> f64 {
        self.alpha.to_f64().unwrap_or(f64::NAN) * k + self.beta.to_f64().unwrap_or(f64::NAN)
    }

    /// `L` increasing and positive from `start` on, `s >= 1`.
    pub fn check(&self, start: i64) -> Result<(), AnalyticError> {
        if self.s == 0 {
            return Err(AnalyticError::Invalid("exponent must be at least 1".into()));
        }
        if !self.alpha.is_positive() {
            return Err(AnalyticError::Invalid("index form must increase".into()));
        }
        if !self.lin(&start.into()).is_positive() {
            return Err(AnalyticError::Invalid(format!(
                "base vanishes or is negative at k = {start}"
            )));
        }
        Ok(())
    }

    pub(crate) fn sign_at(&self, k: &BigInt) -> i32 {
        if self.alternating && k.is_odd() {
            -1
        } else {
            1
        }
    }

    pub(crate) fn coef_ball(&self, prec: u32) -> BallReal {
        match &self.coef {
            Coef::Exact(q) => BallReal::from_rational(q, prec),
            Coef::Ball(b) => b.with_prec(prec),
        }
    }

    pub(crate) fn coef_mag(&self) -> Mag {
        match &self.coef {
            Coef::Exact(q) => Mag::from_rational_upper(q),
            Coef::Ball(b) => b.mag_upper(),
        }
    }

    pub(crate) fn coef_f64(&self) -> f64 {
        self.coef_mag().to_f64()
    }

    /// Common denominator `d` and integer numerators so that
    /// `L(k) = (a k + b) / d`.
    pub(crate) fn integer_form(&self) -> (BigInt, BigInt, BigInt) {
        let d = self.alpha.denom().lcm(self.beta.denom());
        let a = (&self.alpha * BigRational::from_integer(d.clone())).to_integer();
        let b = (&self.beta * BigRational::from_integer(d.clone())).to_integer();
        (a, b, d)
    }

    /// Upper bound on `|c| / L(k)^s`.
    pub(crate) fn term_mag(&self, k: &BigInt) -> Mag {
        self.coef_mag().mul(&pow_recip_upper(&self.lin(k), self.s))
    }
}

/// Lower bound on a positive rational.
pub(crate) fn mag_lower_of(q: &BigRational) -> Mag {
    let n = q.numer().abs();
    let d = q.denom();
    let shift = 64 + d.bits() as i64 - n.bits() as i64;
    let scaled = if shift >= 0 {
        (n << shift as usize).div_floor(d)
    } else {
        (n >> (-shift) as usize).div_floor(d)
    };
    Mag::from_bigint_lower(&scaled, -shift)
}

/// Upper bound on `q^-s` for a positive rational `q`.
pub(crate) fn pow_recip_upper(q: &BigRational, s: u32) -> Mag {
    Mag::one().div(&mag_lower_of(q).pow_u32_lower(s))
}

/// `sum_{k=start}^{start+n-1} sign(k) / L(k)^s` accumulated in fixed point,
/// as a ball (the coefficient is applied by the caller).
pub(crate) fn inner_partial_sum(term: &PowerTerm, start: i64, n: u64, prec: u32) -> BallReal {
    if n == 0 {
        return BallReal::zero(prec);
    }
    // n units of rounding error stay below the working precision
    let w = prec_bits(prec) as i64 + 8 + (64 - n.leading_zeros() as i64);
    let (a, b, d) = term.integer_form();
    let num = num_traits::pow(d, term.s as usize) << w as usize;
    let mut acc = BigInt::zero();
    let mut lnum = &a * BigInt::from(start) + &b;
    let mut k = BigInt::from(start);
    for _ in 0..n {
        let den = num_traits::pow(lnum.clone(), term.s as usize);
        let q = num.div_floor(&den);
        if term.sign_at(&k) < 0 {
            acc -= q;
        } else {
            acc += q;
        }
        lnum += &a;
        k += 1;
    }
    // each floor division is short by less than one unit
    let err = Mag::from_u64(n).mul_2exp(-w);
    BallReal::from_parts(acc, -w, err, prec)
}

/// Plain partial sum with the first omitted term as the tail bound; `L`
/// increasing makes the terms decrease.
pub fn alternating_sum(
    term: &PowerTerm,
    start: i64,
    n_terms: u64,
    prec: u32,
) -> Result<Enclosure, AnalyticError> {
    term.check(start)?;
    if !term.alternating {
        return Err(AnalyticError::Invalid("series is not alternating".into()));
    }
    let wprec = prec + 6;
    let partial = inner_partial_sum(term, start, n_terms, wprec).mul(&term.coef_ball(wprec));
    let next = BigInt::from(start) + n_terms;
    let tail = term.term_mag(&next);
    let value = partial.add_error(&tail).with_prec(prec);
    Ok(Enclosure::new(
        value,
        TailBound::new(Technique::AlternatingNextTerm, tail, prec),
        n_terms,
        prec,
    ))
}

/// Plain partial sum of a positive series, tail bounded by
/// `int_{N-1}^inf c / L(x)^s dx`.
pub fn positive_sum_integral(
    term: &PowerTerm,
    start: i64,
    n_terms: u64,
    prec: u32,
) -> Result<Enclosure, AnalyticError> {
    term.check(start)?;
    if term.alternating || term.s < 2 {
        return Err(AnalyticError::Invalid(
            "integral comparison needs a positive series with s >= 2".into(),
        ));
    }
    let wprec = prec + 6;
    let partial = inner_partial_sum(term, start, n_terms, wprec).mul(&term.coef_ball(wprec));
    let n = BigInt::from(start) + n_terms;
    // the comparison point L(N - 1) must stay positive
    let lo = term.lin(&(&n - 1u32));
    let l = if lo.is_positive() { lo } else { term.lin(&n) };
    let integral = BallReal::from_rational(&l, wprec)
        .pow_i64(1 - i64::from(term.s))?
        .div(&BallReal::from_rational(&term.alpha, wprec))?
        .div_i64(i64::from(term.s) - 1)?;
    let mut tail = integral.mag_upper().mul(&term.coef_mag());
    if l == term.lin(&n) {
        tail = tail.add(&term.term_mag(&n));
    }
    let value = partial.add_error(&tail).with_prec(prec);
    Ok(Enclosure::new(
        value,
        TailBound::new(Technique::IntegralComparison, tail, prec),
        n_terms,
        prec,
    ))
}

/// Euler-Maclaurin corrections for `sum_{i>=0} (A i + B)^-s` beyond the
/// integral: `F(0)/2 + sum_j B_2j/(2j)! (s)_{2j-1} A^{2j-1} B^{1-s-2j}`.
/// The function is completely monotone, so for any cut-off the remainder
/// lies between zero and the first omitted term; twice that term is
/// returned as the bound. Stops at `target` or where the asymptotic terms
/// start growing.
fn em_corrections(a: &BigRational, b: &BigRational, s: u32, target: &Mag) -> (BigRational, Mag) {
    const MAX_K: usize = 400;
    let bpow = num_traits::pow(b.clone(), s as usize);
    let mut corr = bpow.recip() / BigRational::from_integer(2.into());
    // q_j = (s)_{2j-1} A^{2j-1} B^{1-s-2j} / (2j)!
    let mut q = BigRational::from_integer(s.into()) * a / (&bpow * b) / BigRational::from_integer(2.into());
    let a2b2 = (a * a) / (b * b);
    let mut table = bernoulli_table(32);
    let mut prev: Option<Mag> = None;
    for j in 1..=MAX_K {
        if table.len() < j {
            table = bernoulli_table(2 * j);
        }
        let r = &table[j - 1] * &q;
        let mag = Mag::from_rational_upper(&r);
        if mag <= *target || prev.is_some_and(|p| mag >= p) || j == MAX_K {
            return (corr, mag.mul_2exp(1));
        }
        corr += r;
        prev = Some(mag);
        let jj = 2 * j as u64;
        let sj = u64::from(s) + jj;
        q = q * a2b2.clone()
            * BigRational::new(BigInt::from((sj - 1) * sj), BigInt::from((jj + 1) * (jj + 2)));
    }
    unreachable!("loop returns at MAX_K")
}

/// `sum_{i>=0} (step i + b)^-s` for `s >= 2`, `b > 0`.
pub(crate) fn em_positive_tail(step: &BigRational, b: &BigRational, s: u32, prec: u32) -> BallReal {
    let target = Mag::pow2(-(prec_bits(prec) as i64 + 8));
    let (corr, rem) = em_corrections(step, b, s, &target);
    let sf = i64::from(s);
    let integral = pow_rational(b, 1 - sf) / (step * BigRational::from_integer((sf - 1).into()));
    BallReal::from_rational(&(integral + corr), prec).add_error(&rem)
}

/// `sum_{k>=0} (-1)^k (alpha k + b)^-s`, split into its even and odd
/// subsequences.
pub(crate) fn em_alternating_tail(
    alpha: &BigRational,
    b: &BigRational,
    s: u32,
    prec: u32,
) -> Result<BallReal, AnalyticError> {
    let target = Mag::pow2(-(prec_bits(prec) as i64 + 8));
    let step = alpha * BigRational::from_integer(2.into());
    let b2 = b + alpha;
    let (c1, r1) = em_corrections(&step, b, s, &target);
    let (c2, r2) = em_corrections(&step, &b2, s, &target);
    let sf = i64::from(s);
    let integral = if s == 1 {
        BallReal::from_rational(&(&b2 / b), prec)
            .ln()?
            .div(&BallReal::from_rational(&step, prec))?
    } else {
        let d = pow_rational(b, 1 - sf) - pow_rational(&b2, 1 - sf);
        BallReal::from_rational(&(d / (&step * BigRational::from_integer((sf - 1).into()))), prec)
    };
    Ok(integral
        .add(&BallReal::from_rational(&(c1 - c2), prec))
        .add_error(&r1.add(&r2)))
}

/// Direct summation up to an index where `L(N)` is large compared with the
/// step, then an Euler-Maclaurin tail. Works to any precision; the
/// alternating case splits the tail into even and odd subsequences.
pub fn power_sum_em(
    term: &PowerTerm,
    start: i64,
    prec: u32,
) -> Result<Enclosure, AnalyticError> {
    term.check(start)?;
    if !term.alternating && term.s < 2 {
        return Err(AnalyticError::Invalid("divergent series".into()));
    }
    let wprec = prec + 8;
    let bits = prec_bits(wprec) as i64;
    let step = if term.alternating {
        &term.alpha * BigRational::from_integer(2.into())
    } else {
        term.alpha.clone()
    };
    // L(N) >= M * step keeps the correction terms shrinking fast
    let m = BigRational::from_integer(BigInt::from(bits / 5 + i64::from(term.s) + 4));
    let need = ((&m * &step - &term.beta) / &term.alpha).ceil().to_integer();
    let n = need.max(BigInt::from(start));
    let n_i64 = n
        .to_i64()
        .ok_or_else(|| AnalyticError::Invalid("index out of range".into()))?;
    let count = (n_i64 - start) as u64;
    let inner = inner_partial_sum(term, start, count, wprec);

    let b1 = term.lin(&n);
    let tail_inner = if term.alternating {
        let t = em_alternating_tail(&term.alpha, &b1, term.s, wprec)?;
        if n.is_odd() {
            t.neg()
        } else {
            t
        }
    } else {
        em_positive_tail(&step, &b1, term.s, wprec)
    };
    let coef = term.coef_ball(wprec);
    let tail = tail_inner.mul(&coef);
    let value = inner.mul(&coef).add(&tail).with_prec(prec);
    Ok(Enclosure::new(
        value,
        TailBound::new(Technique::EulerMaclaurin, tail.mag_upper(), prec),
        count,
        prec,
    ))
}

pub(crate) fn pow_rational(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::mpball::const_pi;

    #[test]
    fn leibniz_partial_sum() {
        let t = PowerTerm::simple(1, true, 2, 1, 1);
        let e = alternating_sum(&t, 0, 1000, 20).unwrap();
        let quarter_pi = const_pi(20).mul_2exp(-2);
        assert!(e.value.overlaps(&quarter_pi));
        assert!(e.value.rad().to_f64() < 1.1e-3);
    }

    #[test]
    fn em_tail_matches_closed_forms() {
        // zeta(2) and beta(1), beta(3)
        let pi = const_pi(60);
        let z2 = power_sum_em(&PowerTerm::simple(1, false, 1, 0, 2), 1, 50).unwrap();
        assert!(z2.value.overlaps(&pi.sqr().div_i64(6).unwrap()));
        assert!(z2.value.rad().log10_approx() < -49.0);
        let b1 = power_sum_em(&PowerTerm::simple(1, true, 2, 1, 1), 0, 50).unwrap();
        assert!(b1.value.overlaps(&pi.mul_2exp(-2)));
        assert!(b1.value.rad().log10_approx() < -49.0);
        let b3 = power_sum_em(&PowerTerm::simple(1, true, 2, 1, 3), 0, 50).unwrap();
        assert!(b3.value.overlaps(&pi.pow_i64(3).unwrap().div_i64(32).unwrap()));
    }

    #[test]
    fn em_handles_rational_forms_and_odd_start() {
        // sum_{k>=1} (-1)^k / (k/2 + 1)^2 against a long plain sum
        let t = PowerTerm {
            coef: Coef::Exact(BigRational::new(3.into(), 2.into())),
            alternating: true,
            alpha: BigRational::new(1.into(), 2.into()),
            beta: BigRational::one(),
            s: 2,
        };
        let em = power_sum_em(&t, 1, 30).unwrap();
        let plain = alternating_sum(&t, 1, 200_000, 30).unwrap();
        assert!(em.value.overlaps(&plain.value));
        assert!(em.value.rad().log10_approx() < -29.0);
    }
}
