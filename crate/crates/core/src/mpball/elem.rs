use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::mag::Mag;
use super::real::{prec_bits, BallReal, MIN_PREC};
use super::BallError;

/// Elementary functions accepted by [`BallReal::elem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elem {
    Exp,
    Ln,
    Sqrt,
    Cosh,
    Sinh,
}

/// Extra decimal digits used inside the series evaluations.
const INNER_GUARD: u32 = 6;

/// Fixed-point `2^w * atan(1/n)` (or `atanh` when `hyperbolic`), with an
/// upper bound on the error in units of `2^-w`.
fn arctan_recip_fixed(n: u64, w: u64, hyperbolic: bool) -> (BigInt, u64) {
    let n2 = BigInt::from(n) * n;
    let mut power = (BigInt::one() << w) / n;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if hyperbolic || k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    // each term is off by < 3 units; the omitted tail is < 3 units
    (sum, 3 * k + 3)
}

/// Ball containing pi with radius at most `10^-prec`.
pub fn const_pi(prec: u32) -> BallReal {
    let prec = prec.max(MIN_PREC);
    let w = prec_bits(prec) + 16;
    let (a5, e5) = arctan_recip_fixed(5, w, false);
    let (a239, e239) = arctan_recip_fixed(239, w, false);
    let man = a5 * 16 - a239 * 4;
    let err = Mag::from_u64(16 * e5 + 4 * e239).mul_2exp(-(w as i64));
    BallReal::from_parts(man, -(w as i64), err, prec)
}

/// Ball containing ln 2.
pub fn const_ln2(prec: u32) -> BallReal {
    let prec = prec.max(MIN_PREC);
    let w = prec_bits(prec) + 16;
    let (a3, e3) = arctan_recip_fixed(3, w, true);
    BallReal::from_parts(a3 * 2, -(w as i64), Mag::from_u64(2 * e3).mul_2exp(-(w as i64)), prec)
}

/// Number of bits needed to write `|mid|`, as an exponent: `|mid| < 2^top`.
fn mid_top(x: &BallReal) -> Option<i64> {
    let (man, exp) = x.mid_parts();
    if man.is_zero() {
        None
    } else {
        Some(exp + man.bits() as i64)
    }
}

fn digits_for_bits(bits: i64) -> u32 {
    ((bits.max(0) as f64) * 0.302).ceil() as u32
}

impl BallReal {
    pub fn elem(&self, f: Elem) -> Result<BallReal, BallError> {
        match f {
            Elem::Exp => self.exp(),
            Elem::Ln => self.ln(),
            Elem::Sqrt => self.sqrt(),
            Elem::Cosh => self.cosh(),
            Elem::Sinh => self.sinh(),
        }
    }

    pub fn exp(&self) -> Result<BallReal, BallError> {
        let prec = self.prec();
        let r = self.rad();
        let Some(top) = mid_top(self) else {
            return Ok(BallReal::one(prec).add_error(&r.expm1()));
        };
        if top > 40 {
            return Err(BallError::Overflow("exp"));
        }
        // |t| < 2^-12 after scaling by 2^-k
        let k = (top + 12).max(0);
        let wprec = prec + digits_for_bits(k) + INNER_GUARD;
        let wbits = prec_bits(wprec) as i64;
        let t = self.mid().with_prec(wprec).mul_2exp(-k);
        let tmag = t.mag_upper();
        let mut sum = BallReal::one(wprec);
        let mut term = BallReal::one(wprec);
        let mut j = 1i64;
        loop {
            term = term.mul(&t).div_i64(j)?;
            sum = sum.add(&term);
            if term.mag_upper().log2_floor().is_none_or(|l| l < -wbits - 4) {
                break;
            }
            j += 1;
        }
        // remaining terms: at most 2 |term| |t|
        sum = sum.add_error(&term.mag_upper().mul(&tmag).mul_2exp(1));
        for _ in 0..k {
            sum = sum.sqr();
        }
        let mut out = sum.with_prec(prec);
        if !r.is_zero() {
            let scale = out.mag_upper();
            out = out.add_error(&scale.mul(&r.expm1()));
        }
        Ok(out)
    }

    pub fn ln(&self) -> Result<BallReal, BallError> {
        if !self.is_positive() {
            return Err(BallError::Domain {
                func: "ln",
                ball: self.to_string(),
            });
        }
        let prec = self.prec();
        let wprec = prec + INNER_GUARD;
        let wbits = prec_bits(wprec) as i64;
        let (man, _) = self.mid_parts();
        let mut e2 = mid_top(self).unwrap_or(0);
        // y = mid / 2^e2 in [1/2, 1); move to [1/sqrt2, sqrt2)
        let top16 = {
            let len = man.bits();
            let shifted: BigInt = if len > 16 { man >> (len - 16) } else { man << (16 - len) };
            i64::try_from(&shifted).unwrap_or(1 << 15)
        };
        // 2^16 / sqrt(2) = 46340.95
        if top16 <= 46340 {
            e2 -= 1;
        }
        let y = self.mid().with_prec(wprec).mul_2exp(-e2);
        let one = BallReal::one(wprec);
        let z = y.sub(&one).div(&y.add(&one))?;
        let z2 = z.sqr();
        let mut power = z.clone();
        let mut sum = z.clone();
        let mut j = 1i64;
        loop {
            power = power.mul(&z2);
            if power.mag_upper().log2_floor().is_none_or(|l| l < -wbits - 4) {
                break;
            }
            sum = sum.add(&power.div_i64(2 * j + 1)?);
            j += 1;
        }
        // omitted tail <= |power| / (1 - z^2) <= 2 |power| since |z| < 0.18
        sum = sum.add_error(&power.mag_upper().mul_2exp(1));
        let mut out = sum.mul_2exp(1);
        if e2 != 0 {
            out = out.add(&const_ln2(wprec).mul_i64(e2));
        }
        let mut out = out.with_prec(prec);
        let r = self.rad();
        if !r.is_zero() {
            // |ln'| <= 1 / (mid - r) on the ball
            let lower = self.mag_lower();
            out = out.add_error(&r.div(&lower));
        }
        Ok(out)
    }

    pub fn sqrt(&self) -> Result<BallReal, BallError> {
        if !self.is_nonnegative() {
            return Err(BallError::Domain {
                func: "sqrt",
                ball: self.to_string(),
            });
        }
        let prec = self.prec();
        let (man, exp) = self.mid_parts();
        let r = self.rad();
        if man.is_zero() {
            return Ok(BallReal::from_radius(r.sqrt(), prec));
        }
        let bits = prec_bits(prec) as i64;
        let mut shift = (2 * bits + 4 - man.bits() as i64).max(0);
        if (exp - shift) % 2 != 0 {
            shift += 1;
        }
        let n: BigInt = man << (shift as usize);
        let root = n.sqrt();
        let e = (exp - shift) / 2;
        let exact = &root * &root == n;
        let err = if exact { Mag::zero() } else { Mag::pow2(e) };
        let mut out = BallReal::from_parts(root.clone(), e, err, prec);
        if !r.is_zero() {
            // |sqrt(y) - sqrt(m)| <= r / sqrt(m); floor(root) is a lower bound
            let lower = Mag::from_bigint_lower(&root, e);
            out = out.add_error(&r.div(&lower));
        }
        Ok(out)
    }

    pub fn cosh(&self) -> Result<BallReal, BallError> {
        let e = self.exp()?;
        let inv = e.recip()?;
        Ok(e.add(&inv).mul_2exp(-1))
    }

    pub fn sinh(&self) -> Result<BallReal, BallError> {
        let e = self.exp()?;
        let inv = e.recip()?;
        Ok(e.sub(&inv).mul_2exp(-1))
    }

    /// `(sin x, cos x)` for moderate arguments (|x| < 2^20).
    pub fn sin_cos(&self) -> Result<(BallReal, BallReal), BallError> {
        let prec = self.prec();
        let r = self.rad();
        let Some(top) = mid_top(self) else {
            let s = BallReal::zero(prec).add_error(&r);
            let c = BallReal::one(prec).add_error(&r);
            return Ok((s, c));
        };
        if top > 20 {
            return Err(BallError::Domain {
                func: "sin_cos",
                ball: self.to_string(),
            });
        }
        let k = (top + 10).max(0);
        let wprec = prec + digits_for_bits(k) + INNER_GUARD;
        let wbits = prec_bits(wprec) as i64;
        let t = self.mid().with_prec(wprec).mul_2exp(-k);
        let t2 = t.sqr();
        let tmag = t.mag_upper();
        let mut s = t.clone();
        let mut c = BallReal::one(wprec);
        let mut s_term = t.clone();
        let mut c_term = BallReal::one(wprec);
        let mut j = 1i64;
        loop {
            c_term = c_term.mul(&t2).div_i64((2 * j - 1) * (2 * j))?.neg();
            s_term = s_term.mul(&t2).div_i64((2 * j) * (2 * j + 1))?.neg();
            c = c.add(&c_term);
            s = s.add(&s_term);
            if s_term.mag_upper().log2_floor().is_none_or(|l| l < -wbits - 4) {
                break;
            }
            j += 1;
        }
        // alternating tails with |t| < 1: bounded by the next term
        s = s.add_error(&s_term.mag_upper().mul(&tmag));
        c = c.add_error(&c_term.mag_upper().mul(&tmag));
        for _ in 0..k {
            let s2 = s.mul(&c).mul_2exp(1);
            let c2 = BallReal::one(wprec).sub(&s.sqr().mul_2exp(1));
            s = s2;
            c = c2;
        }
        // |sin'|, |cos'| <= 1
        Ok((s.with_prec(prec).add_error(&r), c.with_prec(prec).add_error(&r)))
    }

    pub fn atan(&self) -> Result<BallReal, BallError> {
        let prec = self.prec();
        let r = self.rad();
        let Some(top) = mid_top(self) else {
            return Ok(BallReal::zero(prec).add_error(&r));
        };
        let wprec = prec + INNER_GUARD;
        let m = self.mid().with_prec(wprec);
        let mut out = if top > 0 {
            // |m| >= 1/2 may still be below 1; the identity holds for any m != 0
            let half_pi = const_pi(wprec).mul_2exp(-1);
            let inner = m.recip()?.atan_small()?;
            if m.is_positive() {
                half_pi.sub(&inner)
            } else {
                half_pi.neg().sub(&inner)
            }
        } else {
            m.atan_small()?
        };
        out = out.with_prec(prec);
        Ok(out.add_error(&r))
    }

    /// atan of an exact ball with |x| <= 1.
    fn atan_small(&self) -> Result<BallReal, BallError> {
        let wprec = self.prec();
        let wbits = prec_bits(wprec) as i64;
        let one = BallReal::one(wprec);
        // atan x = 2 atan(x / (1 + sqrt(1 + x^2)))
        let halvings = 4;
        let mut t = self.clone();
        for _ in 0..halvings {
            let d = one.add(&one.add(&t.sqr()).sqrt()?);
            t = t.div(&d)?;
        }
        let t2 = t.sqr();
        let mut power = t.clone();
        let mut sum = t.clone();
        let mut j = 1i64;
        loop {
            power = power.mul(&t2).neg();
            if power.mag_upper().log2_floor().is_none_or(|l| l < -wbits - 4) {
                break;
            }
            sum = sum.add(&power.div_i64(2 * j + 1)?);
            j += 1;
        }
        sum = sum.add_error(&power.mag_upper());
        Ok(sum.mul_2exp(halvings))
    }
}
