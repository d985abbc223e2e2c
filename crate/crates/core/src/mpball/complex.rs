use std::fmt;

use super::elem::const_pi;
use super::real::BallReal;
use super::BallError;

/// Rectangular complex ball; containment is componentwise.
#[derive(Clone, Debug)]
pub struct BallComplex {
    pub re: BallReal,
    pub im: BallReal,
}

impl BallComplex {
    pub fn new(re: BallReal, im: BallReal) -> Self {
        BallComplex { re, im }
    }

    pub fn from_real(re: BallReal) -> Self {
        let im = BallReal::zero(re.prec());
        BallComplex { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BallComplex::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn neg(&self) -> Self {
        BallComplex::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        BallComplex::new(self.re.clone(), self.im.neg())
    }

    pub fn add(&self, other: &Self) -> Self {
        BallComplex::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn sub(&self, other: &Self) -> Self {
        BallComplex::new(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    pub fn add_real(&self, x: &BallReal) -> Self {
        BallComplex::new(self.re.add(x), self.im.clone())
    }

    pub fn mul_real(&self, x: &BallReal) -> Self {
        BallComplex::new(self.re.mul(x), self.im.mul(x))
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        BallComplex::new(self.re.mul_2exp(e), self.im.mul_2exp(e))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        BallComplex::new(re, im)
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        BallComplex::new(self.im.neg(), self.re.clone())
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> BallReal {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Result<BallReal, BallError> {
        self.norm_sqr().sqrt()
    }

    pub fn div(&self, other: &Self) -> Result<Self, BallError> {
        let den = other.norm_sqr();
        if den.contains_zero() {
            return Err(BallError::DivisionByZero);
        }
        let num = self.mul(&other.conj());
        Ok(BallComplex::new(num.re.div(&den)?, num.im.div(&den)?))
    }

    pub fn div_real(&self, x: &BallReal) -> Result<Self, BallError> {
        Ok(BallComplex::new(self.re.div(x)?, self.im.div(x)?))
    }

    pub fn recip(&self) -> Result<Self, BallError> {
        BallComplex::from_real(BallReal::one(self.prec())).div(self)
    }

    pub fn pow_i64(&self, n: i64) -> Result<Self, BallError> {
        if n < 0 {
            return self.pow_i64(-n)?.recip();
        }
        let mut result = BallComplex::from_real(BallReal::one(self.prec()));
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    pub fn exp(&self) -> Result<Self, BallError> {
        let scale = self.re.exp()?;
        let (s, c) = self.im.sin_cos()?;
        Ok(BallComplex::new(c.mul(&scale), s.mul(&scale)))
    }

    /// Argument in `(-pi, pi)`; fails on balls touching the branch cut
    /// along the nonpositive real axis.
    pub fn arg(&self) -> Result<BallReal, BallError> {
        let prec = self.prec();
        if self.re.is_positive() {
            return self.im.div(&self.re)?.atan();
        }
        let half_pi = const_pi(prec).mul_2exp(-1);
        if self.im.is_positive() {
            return Ok(half_pi.sub(&self.re.div(&self.im)?.atan()?));
        }
        if self.im.is_negative() {
            return Ok(half_pi.neg().sub(&self.re.div(&self.im)?.atan()?));
        }
        Err(BallError::Domain {
            func: "complex ln",
            ball: self.to_string(),
        })
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Self, BallError> {
        let arg = self.arg()?;
        let modulus = self.norm_sqr().ln()?.mul_2exp(-1);
        Ok(BallComplex::new(modulus, arg))
    }

    /// `sin z = (e^{iz} - e^{-iz}) / 2i`.
    pub fn sin(&self) -> Result<Self, BallError> {
        let iz = self.mul_i();
        let a = iz.exp()?;
        let b = iz.neg().exp()?;
        // (a - b) / (2i) = -i (a - b) / 2
        let d = a.sub(&b).mul_2exp(-1);
        Ok(BallComplex::new(d.im.clone(), d.re.neg()))
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }
}

impl fmt::Display for BallComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}
