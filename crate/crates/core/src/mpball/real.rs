use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::mag::Mag;
use super::BallError;

/// Smallest working precision accepted, in decimal digits.
pub const MIN_PREC: u32 = 8;

/// Binary working precision for `prec` decimal digits, including
/// `10 + prec/10` guard digits.
pub fn prec_bits(prec: u32) -> u64 {
    let digits = u64::from(prec) + 10 + u64::from(prec) / 10;
    // log2(10) < 3.3220
    (digits * 33220).div_ceil(10000) + 2
}

/// A real number enclosed by the ball `[mid - rad, mid + rad]` with
/// `mid = man * 2^exp`.
#[derive(Clone, Debug)]
pub struct BallReal {
    man: BigInt,
    exp: i64,
    rad: Mag,
    prec: u32,
}

/// Truncates `man * 2^exp` to at most `bits` significant bits; returns the
/// new pair and an upper bound on the discarded part.
fn round_mid(man: BigInt, exp: i64, bits: u64) -> (BigInt, i64, Mag) {
    let len = man.bits();
    if len <= bits {
        return (man, exp, Mag::zero());
    }
    let shift = len - bits;
    let tz = man.trailing_zeros().unwrap_or(0);
    if tz >= shift {
        return (man >> shift, exp + shift as i64, Mag::zero());
    }
    // floor shift; error is below one unit of the new last place
    (man >> shift, exp + shift as i64, Mag::pow2(exp + shift as i64))
}

/// `man * 2^exp` as an exact rational.
pub(crate) fn dyadic_to_rational(man: &BigInt, exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(man << (exp as usize))
    } else {
        BigRational::new(man.clone(), BigInt::one() << ((-exp) as usize))
    }
}

impl BallReal {
    pub fn zero(prec: u32) -> Self {
        BallReal {
            man: BigInt::zero(),
            exp: 0,
            rad: Mag::zero(),
            prec: prec.max(MIN_PREC),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    /// Exact when the integer fits the working precision; otherwise rounded
    /// with the error folded into the radius.
    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        let (man, exp, err) = round_mid(n.clone(), 0, prec_bits(prec));
        BallReal {
            man,
            exp,
            rad: err,
            prec,
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let num = Self::from_int(q.numer(), prec);
        if q.denom().is_one() {
            return num;
        }
        num.div_int(q.denom())
            .expect("reduced rational has nonzero denominator")
    }

    /// `man * 2^exp` exactly (rounded only if wider than the precision).
    pub fn from_dyadic(man: BigInt, exp: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        let (man, exp, err) = round_mid(man, exp, prec_bits(prec));
        BallReal {
            man,
            exp,
            rad: err,
            prec,
        }
    }

    pub fn from_parts(man: BigInt, exp: i64, rad: Mag, prec: u32) -> Self {
        let mut b = Self::from_dyadic(man, exp, prec);
        b.rad = b.rad.add(&rad);
        b
    }

    /// A ball centred at zero with the given radius.
    pub fn from_radius(rad: Mag, prec: u32) -> Self {
        let mut b = Self::zero(prec);
        b.rad = rad;
        b
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn bits(&self) -> u64 {
        prec_bits(self.prec)
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn mid_parts(&self) -> (&BigInt, i64) {
        (&self.man, self.exp)
    }

    /// The midpoint as an exact ball of radius zero.
    pub fn mid(&self) -> BallReal {
        BallReal {
            man: self.man.clone(),
            exp: self.exp,
            rad: Mag::zero(),
            prec: self.prec,
        }
    }

    pub fn mid_rational(&self) -> BigRational {
        dyadic_to_rational(&self.man, self.exp)
    }

    pub fn mid_f64(&self) -> f64 {
        if self.man.is_zero() {
            return 0.0;
        }
        let len = self.man.bits() as i64;
        let shift = (len - 60).max(0);
        let top: BigInt = &self.man >> (shift as usize);
        let t = i64::try_from(&top).unwrap_or(0) as f64;
        let e = (self.exp + shift).clamp(-3000, 3000) as i32;
        t * 2f64.powi(e)
    }

    /// Returns a copy at a different precision, rounding the midpoint if
    /// the new precision is lower.
    pub fn with_prec(&self, prec: u32) -> BallReal {
        let prec = prec.max(MIN_PREC);
        let (man, exp, err) = round_mid(self.man.clone(), self.exp, prec_bits(prec));
        BallReal {
            man,
            exp,
            rad: self.rad.add(&err),
            prec,
        }
    }

    /// Widens the radius by `extra`.
    pub fn add_error(&self, extra: &Mag) -> BallReal {
        let mut b = self.clone();
        b.rad = b.rad.add(extra);
        b
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Upper bound on `|mid|`.
    pub fn mid_mag(&self) -> Mag {
        Mag::from_bigint_upper(&self.man, self.exp)
    }

    /// Upper bound on every `|x|` with `x` in the ball.
    pub fn mag_upper(&self) -> Mag {
        self.mid_mag().add(&self.rad)
    }

    /// Lower bound on every `|x|` with `x` in the ball (zero if the ball
    /// contains zero).
    pub fn mag_lower(&self) -> Mag {
        Mag::from_bigint_lower(&self.man, self.exp).sub_lower(&self.rad)
    }

    /// Exact comparison of `|mid|` with `rad`.
    fn cmp_mid_rad(&self) -> Ordering {
        let (rm, re) = self.rad.mantissa_exponent();
        let a = self.man.abs();
        if self.rad.is_zero() {
            return if a.is_zero() {
                Ordering::Equal
            } else {
                Ordering::Greater
            };
        }
        let e = self.exp.min(re);
        let lhs = a << ((self.exp - e) as usize);
        let rhs = BigInt::from(rm) << ((re - e) as usize);
        lhs.cmp(&rhs)
    }

    pub fn contains_zero(&self) -> bool {
        self.cmp_mid_rad() != Ordering::Greater
    }

    /// True when every point of the ball is `> 0`.
    pub fn is_positive(&self) -> bool {
        self.man.sign() == Sign::Plus && self.cmp_mid_rad() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.man.sign() == Sign::Minus && self.cmp_mid_rad() == Ordering::Greater
    }

    /// True when every point of the ball is `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.man.sign() != Sign::Minus && self.cmp_mid_rad() != Ordering::Less
    }

    pub fn lower_rational(&self) -> BigRational {
        self.mid_rational() - self.rad.to_rational()
    }

    pub fn upper_rational(&self) -> BigRational {
        self.mid_rational() + self.rad.to_rational()
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        (self.mid_rational() - q).abs() <= self.rad.to_rational()
    }

    pub fn contains_int(&self, n: i64) -> bool {
        self.contains_rational(&BigRational::from_integer(n.into()))
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains(&self, other: &BallReal) -> bool {
        let d = (self.mid_rational() - other.mid_rational()).abs();
        d + other.rad.to_rational() <= self.rad.to_rational()
    }

    /// True when the two balls share at least one point.
    pub fn overlaps(&self, other: &BallReal) -> bool {
        let d = (self.mid_rational() - other.mid_rational()).abs();
        d <= self.rad.to_rational() + other.rad.to_rational()
    }

    /// `|mid(self) - mid(other)|`, rounded up.
    pub fn mid_distance(&self, other: &BallReal) -> Mag {
        let (e, a, b) = align(&self.man, self.exp, &other.man, other.exp);
        Mag::from_bigint_upper(&(a - b), e)
    }

    /// Certified lower bound on the distance between the two sets;
    /// zero when they overlap.
    pub fn separation(&self, other: &BallReal) -> BigRational {
        let d = (self.mid_rational() - other.mid_rational()).abs();
        let gap = d - self.rad.to_rational() - other.rad.to_rational();
        if gap.is_negative() {
            BigRational::zero()
        } else {
            gap
        }
    }

    pub fn neg(&self) -> BallReal {
        BallReal {
            man: -&self.man,
            exp: self.exp,
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> BallReal {
        BallReal {
            man: self.man.abs(),
            exp: self.exp,
            rad: self.rad,
            prec: self.prec,
        }
    }

    /// Multiplication by `2^e`, exact.
    pub fn mul_2exp(&self, e: i64) -> BallReal {
        BallReal {
            man: self.man.clone(),
            exp: if self.man.is_zero() { 0 } else { self.exp + e },
            rad: self.rad.mul_2exp(e),
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &BallReal) -> BallReal {
        let prec = self.prec.max(other.prec);
        let bits = prec_bits(prec);
        if other.man.is_zero() {
            let mut r = self.with_prec(prec);
            r.rad = r.rad.add(&other.rad);
            return r;
        }
        if self.man.is_zero() {
            let mut r = other.with_prec(prec);
            r.rad = r.rad.add(&self.rad);
            return r;
        }
        let mut rad = self.rad.add(&other.rad);
        // drop bits far below the result's precision before aligning
        let top = (self.exp + self.man.bits() as i64).max(other.exp + other.man.bits() as i64);
        let floor = top - bits as i64 - 16;
        let (am, ae) = truncate_below(&self.man, self.exp, floor, &mut rad);
        let (bm, be) = truncate_below(&other.man, other.exp, floor, &mut rad);
        let (e, a, b) = align(&am, ae, &bm, be);
        let (man, exp, err) = round_mid(a + b, e, bits);
        BallReal {
            man,
            exp,
            rad: rad.add(&err),
            prec,
        }
    }

    pub fn sub(&self, other: &BallReal) -> BallReal {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BallReal) -> BallReal {
        let prec = self.prec.max(other.prec);
        let (man, exp, err) = round_mid(&self.man * &other.man, self.exp + other.exp, prec_bits(prec));
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            err
        } else {
            let am = self.mid_mag();
            let bm = other.mid_mag();
            am.mul(&other.rad)
                .add(&bm.mul(&self.rad))
                .add(&self.rad.mul(&other.rad))
                .add(&err)
        };
        BallReal {
            exp: if man.is_zero() { 0 } else { exp },
            man,
            rad,
            prec,
        }
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: &BigInt) -> BallReal {
        let (man, exp, err) = round_mid(&self.man * n, self.exp, self.bits());
        let nm = Mag::from_bigint_upper(n, 0);
        BallReal {
            exp: if man.is_zero() { 0 } else { exp },
            man,
            rad: self.rad.mul(&nm).add(&err),
            prec: self.prec,
        }
    }

    pub fn mul_i64(&self, n: i64) -> BallReal {
        self.mul_int(&BigInt::from(n))
    }

    pub fn sqr(&self) -> BallReal {
        self.mul(self)
    }

    /// Correctly bounded quotient of the midpoints: returns the quotient
    /// with `bits` significant bits and the truncation error.
    fn div_mid(an: &BigInt, ae: i64, bn: &BigInt, be: i64, bits: u64) -> (BigInt, i64, Mag) {
        if an.is_zero() {
            return (BigInt::zero(), 0, Mag::zero());
        }
        let shift = (bits as i64 + bn.bits() as i64 - an.bits() as i64 + 2).max(0);
        let num = an << (shift as usize);
        let (q, r) = num.div_rem(bn);
        let exp = ae - shift - be;
        let err = if r.is_zero() { Mag::zero() } else { Mag::pow2(exp) };
        let (man, exp2, err2) = round_mid(q, exp, bits);
        (man, exp2, err.add(&err2))
    }

    pub fn div(&self, other: &BallReal) -> Result<BallReal, BallError> {
        if other.contains_zero() {
            return Err(BallError::DivisionByZero);
        }
        let prec = self.prec.max(other.prec);
        let bits = prec_bits(prec);
        let (man, exp, err) = Self::div_mid(&self.man, self.exp, &other.man, other.exp, bits);
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            err
        } else {
            // (|a| rb + |b| ra) / (|b| (|b| - rb))
            let bm_lo = Mag::from_bigint_lower(&other.man, other.exp);
            let den = bm_lo.mul_lower(&bm_lo.sub_lower(&other.rad));
            if den.is_zero() {
                return Err(BallError::DivisionByZero);
            }
            let num = self
                .mid_mag()
                .mul(&other.rad)
                .add(&other.mid_mag().mul(&self.rad));
            num.div(&den).add(&err)
        };
        Ok(BallReal {
            man,
            exp,
            rad,
            prec,
        })
    }

    /// Division by an exact nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> Result<BallReal, BallError> {
        if n.is_zero() {
            return Err(BallError::DivisionByZero);
        }
        let (man, exp, err) = Self::div_mid(&self.man, self.exp, n, 0, self.bits());
        let rad = if self.rad.is_zero() {
            err
        } else {
            self.rad.div(&Mag::from_bigint_lower(n, 0)).add(&err)
        };
        Ok(BallReal {
            man,
            exp,
            rad,
            prec: self.prec,
        })
    }

    pub fn div_i64(&self, n: i64) -> Result<BallReal, BallError> {
        self.div_int(&BigInt::from(n))
    }

    pub fn recip(&self) -> Result<BallReal, BallError> {
        BallReal::one(self.prec).div(self)
    }

    /// Integer power by repeated squaring; negative exponents divide.
    pub fn pow_i64(&self, n: i64) -> Result<BallReal, BallError> {
        if n < 0 {
            let p = self.pow_i64(-n)?;
            return p.recip();
        }
        let mut result = BallReal::one(self.prec);
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        Ok(result)
    }

    /// Smallest ball (at this precision) containing both `self` and `other`.
    pub fn union(&self, other: &BallReal) -> BallReal {
        let lo = self.lower_rational().min(other.lower_rational());
        let hi = self.upper_rational().max(other.upper_rational());
        BallReal::from_interval(&lo, &hi, self.prec.max(other.prec))
    }

    /// Ball enclosing the closed interval `[lo, hi]`.
    pub fn from_interval(lo: &BigRational, hi: &BigRational, prec: u32) -> BallReal {
        let two = BigRational::from_integer(2.into());
        let mid = BallReal::from_rational(&((lo + hi) / &two), prec);
        let half = (hi - lo) / two;
        let halfm = BallReal::from_rational(&half, prec).mag_upper();
        mid.add_error(&halfm)
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn mid_to_decimal(&self, digits: usize) -> String {
        rational_to_decimal(&self.mid_rational(), digits)
    }

    /// Radius rendered in scientific notation, rounded up.
    pub fn rad_to_string(&self) -> String {
        mag_to_sci(&self.rad)
    }
}

/// Drops the bits of `man * 2^exp` below `2^floor`, adding the loss to `rad`.
fn truncate_below(man: &BigInt, exp: i64, floor: i64, rad: &mut Mag) -> (BigInt, i64) {
    if exp >= floor {
        return (man.clone(), exp);
    }
    let shift = (floor - exp) as u64;
    if shift >= man.bits() {
        *rad = rad.add(&Mag::from_bigint_upper(man, exp));
        return (BigInt::zero(), floor);
    }
    let q = man >> shift;
    if (&q << shift) != *man {
        *rad = rad.add(&Mag::pow2(floor));
    }
    (q, floor)
}

fn align(am: &BigInt, ae: i64, bm: &BigInt, be: i64) -> (i64, BigInt, BigInt) {
    let e = ae.min(be);
    (
        e,
        am << ((ae - e) as usize),
        bm << ((be - e) as usize),
    )
}

/// Rounds `q` to `digits` significant decimal digits (round half away).
pub(crate) fn rational_to_decimal(q: &BigRational, digits: usize) -> String {
    decimal(q, digits, false)
}

/// Like [`rational_to_decimal`] but truncating toward zero, so a positive
/// lower bound stays a lower bound.
pub(crate) fn rational_to_decimal_trunc(q: &BigRational, digits: usize) -> String {
    decimal(q, digits, true)
}

fn decimal(q: &BigRational, digits: usize, truncate: bool) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let neg = q.is_negative();
    let a = q.abs();
    // estimate the decimal exponent, then correct
    let ten = BigInt::from(10);
    let mut e10: i64 = {
        let nb = a.numer().bits() as f64;
        let db = a.denom().bits() as f64;
        ((nb - db) * std::f64::consts::LOG10_2).floor() as i64
    };
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while a >= pow(e10 + 1) {
        e10 += 1;
    }
    while a < pow(e10) {
        e10 -= 1;
    }
    // scaled = a * 10^(digits-1-e10), rounded to integer
    let scaled = &a * pow(digits as i64 - 1 - e10);
    let two = BigInt::from(2);
    let mut n = if truncate {
        scaled.numer() / scaled.denom()
    } else {
        (scaled.numer() * &two + scaled.denom()) / (scaled.denom() * &two)
    };
    let mut e = e10;
    if n.to_string().len() > digits {
        n /= &ten;
        e += 1;
    }
    let s = n.to_string();
    let body = if (-7..(digits as i64).max(21)).contains(&e) {
        if e >= 0 {
            let int_len = (e + 1) as usize;
            if int_len >= s.len() {
                format!("{}{}", s, "0".repeat(int_len - s.len()))
            } else {
                format!("{}.{}", &s[..int_len], &s[int_len..])
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), s)
        }
    } else if s.len() == 1 {
        format!("{}e{}", s, e)
    } else {
        format!("{}.{}e{}", &s[..1], &s[1..], e)
    };
    let body = if body.contains('.') && !body.contains('e') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Upper-rounded two-significant-digit scientific rendering of a magnitude.
pub(crate) fn mag_to_sci(m: &Mag) -> String {
    if m.is_zero() {
        return "0".to_string();
    }
    let q = m.to_rational();
    let ten = BigInt::from(10);
    let mut e10 = m.log10_approx().floor() as i64;
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while q >= pow(e10 + 1) {
        e10 += 1;
    }
    while q < pow(e10) {
        e10 -= 1;
    }
    let scaled = &q * pow(1 - e10);
    let mut n = scaled.ceil().to_integer();
    if n >= BigInt::from(100) {
        n = (n + 9) / 10;
        e10 += 1;
        if n >= BigInt::from(100) {
            n /= 10;
            e10 += 1;
        }
    }
    let s = n.to_string();
    format!("{}.{}e{}", &s[..1], &s[1..], e10)
}

impl fmt::Display for BallReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(self.prec as usize + 2);
        write!(
            f,
            "[{} +/- {}]",
            self.mid_to_decimal(digits),
            self.rad_to_string()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn one_third() {
        let a = BallReal::from_i64(1, 20);
        let b = BallReal::from_i64(3, 20);
        let q = a.div(&b).unwrap();
        assert!(q.contains_rational(&rat(1, 3)));
        assert!(q.rad().to_f64() <= 1e-19);
        assert!(q.mid_to_decimal(21).starts_with("0.333333333333333333333"));
    }

    #[test]
    fn integer_power_is_exact() {
        let two = BallReal::from_i64(2, 20);
        let p = two.pow_i64(10).unwrap();
        assert!(p.contains_int(1024));
        assert!(p.is_exact());
        let inv = two.pow_i64(-3).unwrap();
        assert!(inv.contains_rational(&rat(1, 8)));
    }

    #[test]
    fn radii_add() {
        let tenth = Mag::from_f64_upper(0.1);
        let a = BallReal::from_i64(1, 20).add_error(&tenth);
        let s = a.add(&a);
        assert!(s.contains_int(2));
        assert!(s.rad().to_f64() >= 0.2);
        assert_eq!(s.mid_to_decimal(5), "2");
    }

    #[test]
    fn division_by_ball_containing_zero_fails() {
        let z = BallReal::from_radius(Mag::from_f64_upper(0.5), 20);
        assert_eq!(
            BallReal::one(20).div(&z).unwrap_err(),
            BallError::DivisionByZero
        );
    }

    #[test]
    fn sign_predicates() {
        let a = BallReal::from_i64(1, 10).add_error(&Mag::from_f64_upper(0.5));
        assert!(a.is_positive());
        let b = BallReal::from_i64(1, 10).add_error(&Mag::from_u64(1));
        assert!(!b.is_positive());
        assert!(b.is_nonnegative());
        assert!(b.contains_zero());
        assert!(BallReal::from_i64(-3, 10).is_negative());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_to_decimal(&rat(1, 8), 5), "0.125");
        assert_eq!(rational_to_decimal(&rat(-22, 7), 4), "-3.143");
        assert_eq!(rational_to_decimal(&rat(1, 3000000000), 2), "3.3e-10");
        assert_eq!(mag_to_sci(&Mag::from_u64(1000)), "1.0e3");
        assert_eq!(mag_to_sci(&Mag::pow2(-10)), "9.8e-4");
    }

    #[test]
    fn adding_tiny_to_huge_keeps_containment() {
        let big = BallReal::from_int(&(BigInt::one() << 400usize), 20);
        let tiny = BallReal::from_dyadic(BigInt::from(3), -400, 20);
        let s = big.add(&tiny);
        let exact = dyadic_to_rational(&(BigInt::one() << 400usize), 0) + rat(3, 1) * dyadic_to_rational(&BigInt::one(), -400);
        assert!(s.contains_rational(&exact));
    }
}
