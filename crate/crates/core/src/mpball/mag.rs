//! Low-precision nonnegative magnitudes used for ball radii.
//!
//! A `Mag` is `man * 2^exp` with a 32-bit normalized mantissa and an `i64`
//! exponent, so radii never overflow or underflow in practice. Every
//! operation has an explicit rounding direction: the plain operations round
//! up (the result is an upper bound), the `*_lower` variants round down.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const MAG_BITS: u32 = 32;
const MAG_MIN: u64 = 1 << (MAG_BITS - 1);
const MAG_LIMIT: u64 = 1 << MAG_BITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Default for Mag {
    fn default() -> Self {
        Mag::zero()
    }
}

/// Shift `man` right by `shift`, rounding up when `up` and any bit is lost.
fn shr_round(man: u64, shift: u32, up: bool) -> u64 {
    if shift == 0 {
        return man;
    }
    if shift >= 64 {
        return u64::from(up && man != 0);
    }
    let q = man >> shift;
    if up && (q << shift) != man {
        q + 1
    } else {
        q
    }
}

impl Mag {
    pub const fn zero() -> Self {
        Mag { man: 0, exp: 0 }
    }

    pub fn one() -> Self {
        Mag::from_u64(1)
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    /// Builds a magnitude from a raw (mantissa, exponent) pair, rounding up.
    fn normalize_up(man: u64, exp: i64) -> Self {
        Self::normalize(man, exp, true)
    }

    fn normalize_down(man: u64, exp: i64) -> Self {
        Self::normalize(man, exp, false)
    }

    fn normalize(mut man: u64, mut exp: i64, up: bool) -> Self {
        if man == 0 {
            return Mag::zero();
        }
        let bits = 64 - man.leading_zeros();
        if bits > MAG_BITS {
            let shift = bits - MAG_BITS;
            man = shr_round(man, shift, up);
            exp += i64::from(shift);
            if man >= MAG_LIMIT {
                // rounding carried into bit 33; the low bit is zero
                man >>= 1;
                exp += 1;
            }
        } else if bits < MAG_BITS {
            let shift = MAG_BITS - bits;
            man <<= shift;
            exp -= i64::from(shift);
        }
        Mag { man, exp }
    }

    pub fn from_u64(n: u64) -> Self {
        Self::normalize_up(n, 0)
    }

    /// `2^e` exactly.
    pub fn pow2(e: i64) -> Self {
        Mag {
            man: MAG_MIN,
            exp: e - i64::from(MAG_BITS - 1),
        }
    }

    /// Upper bound on `|m| * 2^e`.
    pub fn from_bigint_upper(m: &BigInt, e: i64) -> Self {
        Self::from_bigint(m, e, true)
    }

    /// Lower bound on `|m| * 2^e`.
    pub fn from_bigint_lower(m: &BigInt, e: i64) -> Self {
        Self::from_bigint(m, e, false)
    }

    fn from_bigint(m: &BigInt, e: i64, up: bool) -> Self {
        if m.is_zero() {
            return Mag::zero();
        }
        let bits = m.bits();
        if bits <= 64 {
            let v = m.magnitude().iter_u64_digits().next().unwrap_or(0);
            return Self::normalize(v, e, up);
        }
        let shift = bits - 64;
        let mag = m.magnitude();
        let top = (mag >> shift).iter_u64_digits().next().unwrap_or(0);
        let lost = up && mag.trailing_zeros().is_some_and(|tz| tz < shift);
        let top = if lost {
            // top < 2^64 since it has exactly 64 bits; adding one may carry
            match top.checked_add(1) {
                Some(t) => t,
                None => return Mag::pow2(e + shift as i64 + 64),
            }
        } else {
            top
        };
        Self::normalize(top, e + shift as i64, up)
    }

    /// Upper bound for a nonnegative `f64`. Intended for tolerances and
    /// parameters, not for values that must be exact.
    pub fn from_f64_upper(x: f64) -> Self {
        assert!(x >= 0.0 && x.is_finite(), "magnitude from invalid f64 {x}");
        if x == 0.0 {
            return Mag::zero();
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::normalize_up(man, exp)
    }

    pub fn mantissa_exponent(&self) -> (u64, i64) {
        (self.man, self.exp)
    }

    /// Upper bound on `|q|`.
    pub fn from_rational_upper(q: &BigRational) -> Self {
        let n = q.numer().abs();
        let d = q.denom();
        if n.is_zero() {
            return Mag::zero();
        }
        // |q| <= (floor(n * 2^shift / d) + 1) * 2^-shift
        let shift = 64 + d.bits() as i64 - n.bits() as i64;
        let scaled = if shift >= 0 {
            (n << shift as usize).div_floor(d)
        } else {
            (n >> (-shift) as usize).div_floor(d)
        };
        Mag::from_bigint_upper(&(scaled + 1u32), -shift)
    }

    /// Exact value as a big rational.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let m = BigInt::from(self.man);
        if self.exp >= 0 {
            BigRational::from_integer(m << (self.exp as usize))
        } else {
            BigRational::new(m, BigInt::one() << ((-self.exp) as usize))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let e = self.exp.clamp(-2000, 2000) as i32;
        (self.man as f64) * 2f64.powi(e)
    }

    /// `floor(log2(self))`; `None` for zero.
    pub fn log2_floor(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + i64::from(MAG_BITS - 1))
        }
    }

    /// Approximate base-10 logarithm (for reporting and planning only).
    pub fn log10_approx(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ((self.man as f64).log2() + self.exp as f64) * std::f64::consts::LOG10_2
    }

    pub fn add(&self, other: &Mag) -> Mag {
        self.add_dir(other, true)
    }

    pub fn add_lower(&self, other: &Mag) -> Mag {
        self.add_dir(other, false)
    }

    fn add_dir(&self, other: &Mag, up: bool) -> Mag {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let diff = hi.exp - lo.exp;
        if diff >= 60 {
            // lo is below one unit of hi's last place
            let man = if up { hi.man + 1 } else { hi.man };
            return Self::normalize(man, hi.exp, up);
        }
        // 32-bit mantissas shifted by < 60 fit in u128
        let a = u128::from(hi.man) << diff;
        let s = a + u128::from(lo.man);
        let bits = 128 - s.leading_zeros();
        if bits <= 64 {
            Self::normalize(s as u64, lo.exp, up)
        } else {
            let shift = bits - 64;
            let mut q = (s >> shift) as u64;
            if up && (u128::from(q) << shift) != s {
                q += 1;
            }
            Self::normalize(q, lo.exp + i64::from(shift), up)
        }
    }

    /// `max(self - other, 0)` rounded down.
    pub fn sub_lower(&self, other: &Mag) -> Mag {
        if other.is_zero() {
            return *self;
        }
        if self <= other {
            return Mag::zero();
        }
        let diff = self.exp - other.exp;
        if diff >= 60 {
            // subtract one unit in the last place
            return Self::normalize_down(self.man - 1, self.exp);
        }
        // self > other and diff >= 0 here (a larger magnitude never has a
        // smaller exponent when both are normalized)
        let a = u128::from(self.man) << diff;
        let s = a - u128::from(other.man);
        let bits = 128 - s.leading_zeros();
        if bits <= 64 {
            Self::normalize_down(s as u64, other.exp)
        } else {
            let shift = bits - 64;
            Self::normalize_down((s >> shift) as u64, other.exp + i64::from(shift))
        }
    }

    /// `max(self - other, 0)` rounded up.
    pub fn sub_upper(&self, other: &Mag) -> Mag {
        if other.is_zero() {
            return *self;
        }
        if self <= other {
            return Mag::zero();
        }
        let diff = self.exp - other.exp;
        if diff >= 60 {
            return *self;
        }
        let a = u128::from(self.man) << diff;
        let s = a - u128::from(other.man);
        let bits = 128 - s.leading_zeros();
        if bits <= 64 {
            Self::normalize_up(s as u64, other.exp)
        } else {
            let shift = bits - 64;
            let mut q = (s >> shift) as u64;
            if (u128::from(q) << shift) != s {
                q += 1;
            }
            Self::normalize_up(q, other.exp + i64::from(shift))
        }
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::zero();
        }
        Self::normalize_up(self.man * other.man, self.exp + other.exp)
    }

    pub fn mul_lower(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::zero();
        }
        Self::normalize_down(self.man * other.man, self.exp + other.exp)
    }

    pub fn mul_u64(&self, n: u64) -> Mag {
        self.mul(&Mag::from_u64(n))
    }

    pub fn mul_2exp(&self, e: i64) -> Mag {
        if self.is_zero() {
            return *self;
        }
        Mag {
            man: self.man,
            exp: self.exp + e,
        }
    }

    /// Upper bound on `self / other`; `other` must be a lower bound of the
    /// true divisor and nonzero.
    pub fn div(&self, other: &Mag) -> Mag {
        assert!(!other.is_zero(), "magnitude division by zero");
        if self.is_zero() {
            return Mag::zero();
        }
        let num = u128::from(self.man) << 64;
        let den = u128::from(other.man);
        let mut q = num / den;
        if q * den != num {
            q += 1;
        }
        let bits = 128 - q.leading_zeros();
        let shift = bits.saturating_sub(64);
        let mut qs = (q >> shift) as u64;
        if (u128::from(qs) << shift) != q {
            qs += 1;
        }
        Self::normalize_up(qs, self.exp - 64 - other.exp + i64::from(shift))
    }

    /// Lower bound on `self / other`; `other` must be an upper bound of the
    /// true divisor.
    pub fn div_lower(&self, other: &Mag) -> Mag {
        assert!(!other.is_zero(), "magnitude division by zero");
        if self.is_zero() {
            return Mag::zero();
        }
        let num = u128::from(self.man) << 64;
        let q = num / u128::from(other.man);
        let bits = 128 - q.leading_zeros();
        let shift = bits.saturating_sub(64);
        Self::normalize_down((q >> shift) as u64, self.exp - 64 - other.exp + i64::from(shift))
    }

    pub fn pow_u32(&self, n: u32) -> Mag {
        let mut result = Mag::one();
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    pub fn pow_u32_lower(&self, n: u32) -> Mag {
        let mut result = Mag::one();
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_lower(&base);
            }
            base = base.mul_lower(&base);
            k >>= 1;
        }
        result
    }

    /// Upper bound on `sqrt(self)`.
    pub fn sqrt(&self) -> Mag {
        if self.is_zero() {
            return *self;
        }
        // bring to an even exponent with a 62/63-bit mantissa
        let mut man = u128::from(self.man) << 30;
        let mut exp = self.exp - 30;
        if exp % 2 != 0 {
            man <<= 1;
            exp -= 1;
        }
        let mut r = (man as f64).sqrt() as u128;
        while r * r > man {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= man {
            r += 1;
        }
        if r * r != man {
            r += 1;
        }
        Self::normalize_up(r as u64, exp / 2)
    }

    /// Upper bound on `exp(self) - 1`.
    pub fn expm1(&self) -> Mag {
        if self.is_zero() {
            return *self;
        }
        if *self <= Mag::pow2(-1) {
            // e^r - 1 <= r + r^2 for r <= 1
            return self.add(&self.mul(self));
        }
        let x = self.to_f64();
        assert!(x < 700.0, "radius too large for exponential");
        // libm exp is accurate to well within the 2^-20 relative slack added here
        Mag::from_f64_upper(x.exp_m1() * (1.0 + 1.0 / 1048576.0) + 1e-300)
    }

    /// Upper bound on `exp(self)`.
    pub fn exp(&self) -> Mag {
        Mag::one().add(&self.expm1())
    }

    pub fn max(self, other: Mag) -> Mag {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Mag) -> Mag {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .exp
                .cmp(&other.exp)
                .then_with(|| self.man.cmp(&other.man)),
        }
    }
}
