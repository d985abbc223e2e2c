//! Infinite products: alternating factors taken in consecutive pairs, and
//! Euler-type products over odd primes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::series::{em_alternating_tail, em_positive_tail, pow_rational, PowerTerm};
use super::{AnalyticError, Coef, Enclosure, TailBound, Technique};
use crate::mpball::{prec_bits, BallError, BallReal, Mag};

fn mag_ball(m: &Mag, prec: u32) -> BallReal {
    BallReal::from_rational(&m.to_rational(), prec)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Running product of exact positive rationals in fixed point. Each step
/// truncates by less than one unit; later factors can scale earlier errors
/// by at most `exp(sum of max(0, log r))`, which is tracked in `f64` with
/// slack.
struct FixedProduct {
    acc: BigInt,
    w: i64,
    steps: u64,
    growth: f64,
    abs_sum: f64,
}

impl FixedProduct {
    fn new(prec: u32, steps_hint: u64) -> Self {
        let w = prec_bits(prec) as i64 + 16 + (64 - steps_hint.leading_zeros() as i64);
        FixedProduct {
            acc: BigInt::one() << w as usize,
            w,
            steps: 0,
            growth: 0.0,
            abs_sum: 0.0,
        }
    }

    /// Multiplies by `num / den`, with `y ~ num/den - 1` supplied for the
    /// growth estimate.
    fn mul(&mut self, num: &BigInt, den: &BigInt, y: f64) {
        self.acc = (&self.acc * num).div_floor(den);
        self.steps += 1;
        if y > 0.0 {
            self.growth += y;
        }
        self.abs_sum += y.abs();
    }

    fn finish(self, prec: u32) -> BallReal {
        let g = 1.01 * self.growth + 1e-12 * (1.0 + self.abs_sum);
        let scale = Mag::from_f64_upper(g.exp() * 1.0001);
        let err = Mag::from_u64(self.steps + 1).mul(&scale).mul_2exp(-self.w);
        BallReal::from_parts(self.acc, -self.w, err, prec)
    }
}

/// Pairs needed so that the paired-product tail bracket is narrower than
/// `target` (an `f64` estimate, at least 1). The bracket width decays like
/// `L(A)^{-2s-1}`.
pub fn pairs_for_target(term: &PowerTerm, start: i64, target: f64) -> f64 {
    let c = term.coef_f64().max(1e-300);
    let s = f64::from(term.s);
    let alpha = term.alpha.to_f64().unwrap_or(1.0);
    let k = c * (s * alpha + c);
    let width = k * k / (2.0 * alpha) + s * alpha * c * c / 8.0;
    let l = (width / target).powf(1.0 / (2.0 * s + 1.0));
    let l0 = term.lin_f64(start as f64);
    ((l - l0) / (2.0 * alpha)).ceil().max(1.0)
}

/// `prod_{k>=start} (1 + c (-1)^k / L(k)^s)` with `max_pairs` consecutive
/// pairs multiplied out and the remaining log bracketed by integral
/// comparison.
///
/// With `x(a) = gamma f(a)`, `x(a+1) = -gamma f(a+1)`, `f = L^-s` and
/// `gamma = c (-1)^a`, a pair is `1 + y` with `y = gamma D(a) - gamma^2 P(a)`,
/// `D = f(a) - f(a+1)` and `P = f(a) f(a+1)`. Summed over the remaining
/// pairs, the `D` part is an alternating power sum and `P` is squeezed
/// between two copies of a positive one; both are bounded by integral
/// comparison sharpened with Euler-Maclaurin terms. The quadratic part of
/// `log(1 + y)` is bounded one-sidedly.
pub fn paired_product(
    term: &PowerTerm,
    start: i64,
    max_pairs: u64,
    prec: u32,
) -> Result<Enclosure, AnalyticError> {
    term.check(start)?;
    if !term.alternating {
        return Err(AnalyticError::Invalid("pairing needs alternating factors".into()));
    }
    let wprec = prec + 8 + (max_pairs.max(1) as f64).log10().ceil() as u32;
    let half = Mag::one().mul_2exp(-1);

    // factors with |x| > 1/2 are multiplied exactly before pairing starts
    let mut k0 = BigInt::from(start);
    let mut prefix = BigRational::one();
    let mut guard = 0u32;
    while term.term_mag(&k0) > half {
        guard += 1;
        if guard > 1_000_000 {
            return Err(AnalyticError::Invalid("coefficient too large to pair".into()));
        }
        let x = factor_minus_one(term, &k0, wprec)?;
        match x {
            FactorValue::Exact(q) => prefix *= BigRational::one() + q,
            FactorValue::Ball(_) => {
                return Err(AnalyticError::Invalid(
                    "inexact coefficient with a large leading factor".into(),
                ))
            }
        }
        k0 += 1;
    }
    let prefix_ball = BallReal::from_rational(&prefix, wprec);

    let partial = match &term.coef {
        Coef::Exact(c) => fixed_pairs(term, c, &k0, max_pairs, wprec),
        Coef::Ball(_) => ball_pairs(term, &k0, max_pairs, wprec)?,
    };

    let a = &k0 + BigInt::from(2u64 * max_pairs);
    let tail = pair_tail(term, &a, wprec)?;
    let value = prefix_ball.mul(&partial).mul(&tail.exp()?).with_prec(prec);
    Ok(Enclosure::new(
        value,
        TailBound::new(Technique::PairedProduct, tail.mag_upper(), prec),
        max_pairs,
        prec,
    ))
}

enum FactorValue {
    Exact(BigRational),
    Ball(BallReal),
}

fn factor_minus_one(term: &PowerTerm, k: &BigInt, prec: u32) -> Result<FactorValue, BallError> {
    let l = term.lin(k);
    let sign = rat(i64::from(term.sign_at(k)));
    let inv = pow_rational(&l, -i64::from(term.s)) * sign;
    Ok(match &term.coef {
        Coef::Exact(c) => FactorValue::Exact(c * inv),
        Coef::Ball(b) => FactorValue::Ball(b.mul(&BallReal::from_rational(&inv, prec))),
    })
}

fn fixed_pairs(
    term: &PowerTerm,
    c: &BigRational,
    k0: &BigInt,
    pairs: u64,
    prec: u32,
) -> BallReal {
    let (a, b, d) = term.integer_form();
    let s = term.s as usize;
    let cn = c.numer().clone();
    let cd = c.denom().clone();
    let cn_ds = &cn * num_traits::pow(d, s);
    let cds_f = cn_ds.to_f64().unwrap_or(0.0) / cd.to_f64().unwrap_or(1.0);
    let mut prod = FixedProduct::new(prec, pairs);
    let mut lnum = &a * k0 + &b;
    let sign0 = term.sign_at(k0);
    for _ in 0..pairs {
        let l1 = num_traits::pow(lnum.clone(), s);
        lnum += &a;
        let l2 = num_traits::pow(lnum.clone(), s);
        lnum += &a;
        let den1 = &cd * &l1;
        let den2 = &cd * &l2;
        let (num1, num2) = if sign0 > 0 {
            (&den1 + &cn_ds, &den2 - &cn_ds)
        } else {
            (&den1 - &cn_ds, &den2 + &cn_ds)
        };
        let num = num1 * num2;
        let den = den1 * den2;
        let y = {
            let x1 = f64::from(sign0) * cds_f / l1.to_f64().unwrap_or(f64::INFINITY);
            let x2 = -f64::from(sign0) * cds_f / l2.to_f64().unwrap_or(f64::INFINITY);
            x1 + x2 + x1 * x2
        };
        prod.mul(&num, &den, y);
    }
    prod.finish(prec)
}

fn ball_pairs(term: &PowerTerm, k0: &BigInt, pairs: u64, prec: u32) -> Result<BallReal, AnalyticError> {
    let one = BallReal::one(prec);
    let mut acc = one.clone();
    let mut k = k0.clone();
    for _ in 0..2 * pairs {
        if let FactorValue::Ball(x) = factor_minus_one(term, &k, prec)? {
            acc = acc.mul(&one.add(&x));
        }
        k += 1;
    }
    Ok(acc)
}

/// Ball containing `sum_{pairs from A} log(pair)`.
fn pair_tail(term: &PowerTerm, a: &BigInt, prec: u32) -> Result<BallReal, AnalyticError> {
    let s = i64::from(term.s);
    let alpha = &term.alpha;
    let la = term.lin(a);
    let la1 = term.lin(&(a + 1u32));
    let r = |q: &BigRational| BallReal::from_rational(q, prec);

    // sum_i D(A + 2i) = sum_{k>=A} (-1)^(k-A) f(k)
    let sd = em_alternating_tail(alpha, &la, term.s, prec)?;

    // P(x) = (L(x+1/2)^2 - alpha^2/4)^-s, so with g(x) = L(x+1/2)^-2s,
    // g <= P <= g (1 - alpha^2 / (4 L(A+1/2)^2))^-s on [A, inf)
    let lh = (&la + &la1) / rat(2);
    let sg = em_positive_tail(&(alpha * rat(2)), &lh, 2 * term.s, prec);
    let eps = (alpha * alpha) / (&lh * &lh * rat(4));
    let widen = pow_rational(&(BigRational::one() - eps), -s);
    let sp = sg.union(&sg.mul(&r(&widen)));

    let sign = BallReal::from_i64(i64::from(term.sign_at(a)), prec);
    let c = term.coef_ball(prec);
    let gamma = c.mul(&sign);
    let gamma2 = c.sqr();
    let main = gamma.mul(&sd).sub(&gamma2.mul(&sp));

    // |y| <= K L(x)^{-s-1} with K = |c| (s alpha + |c| L(A)^{1-s}), from
    // D(x) <= -f'(x) and P(x) <= f(x)^2
    let cm = term.coef_mag();
    let k_mag = cm.mul(
        &Mag::from_rational_upper(&(alpha * rat(s)))
            .add(&cm.mul(&Mag::from_rational_upper(&pow_rational(&la, 1 - s)))),
    );
    let ymax = k_mag.mul(&Mag::from_rational_upper(&pow_rational(&la, -s - 1)));
    if ymax >= Mag::one().mul_2exp(-1) {
        return Err(AnalyticError::Invalid("pair tail starts too early".into()));
    }
    let pow_sum = pow_rational(&la, -2 * s - 2)
        + pow_rational(&la, -2 * s - 1) / (alpha * rat(2 * (2 * s + 1)));
    let sq = k_mag
        .mul(&k_mag)
        .mul(&Mag::from_rational_upper(&pow_sum))
        .div(&Mag::one().sub_lower(&ymax).mul_2exp(1));

    // log(1 + y) lies in [y - y^2 / (2(1 - |y|)), y]
    let half_sq = sq.mul_2exp(-1);
    Ok(main.sub(&mag_ball(&half_sq, prec)).add_error(&half_sq))
}

/// Factor shape for products over odd primes:
/// `(1 + c chi4(p)^[chi] p^-s)`, or its reciprocal.
#[derive(Clone, Debug)]
pub struct PrimeFactor {
    pub coef: BigRational,
    pub chi: bool,
    pub s: u32,
    pub reciprocal: bool,
}

impl PrimeFactor {
    fn x(&self, p: u64) -> BigRational {
        let sign = if self.chi && p % 4 == 3 { -1 } else { 1 };
        &self.coef * rat(sign) / BigRational::from_integer(num_traits::pow(BigInt::from(p), self.s as usize))
    }

    pub fn factor(&self, p: u64) -> BigRational {
        let f = BigRational::one() + self.x(p);
        if self.reciprocal {
            f.recip()
        } else {
            f
        }
    }
}

/// `prod_{odd p <= limit} factor(p)` over the supplied primes (which must be
/// every odd prime up to `limit`), times a tail bracket from
/// `|log(1 + x)| <= |x| / (1 - |x|)` and
/// `sum_{odd n >= n0} n^-s <= n0^-s + n0^{1-s} / (2(s-1))`.
pub fn prime_product(
    f: &PrimeFactor,
    primes: &[u64],
    limit: u64,
    prec: u32,
) -> Result<Enclosure, AnalyticError> {
    if f.s < 2 {
        return Err(AnalyticError::Invalid(
            "prime products need s >= 2 for a rigorous tail".into(),
        ));
    }
    let s = f.s as usize;
    let wprec = prec + 8 + (primes.len().max(1) as f64).log10().ceil() as u32;
    let c_mag = Mag::from_rational_upper(&f.coef);
    let half = Mag::one().mul_2exp(-1);

    let mut prefix = BigRational::one();
    let mut prod = FixedProduct::new(wprec, primes.len() as u64);
    let cn = f.coef.numer().clone();
    let cd = f.coef.denom().clone();
    let cf = f.coef.to_f64().unwrap_or(0.0);
    for &p in primes {
        let ps = num_traits::pow(BigInt::from(p), s);
        let big = c_mag.mul(&Mag::one().div(&Mag::from_bigint_lower(&ps, 0))) > half;
        if big {
            let fac = BigRational::one() + f.x(p);
            if fac.is_zero() {
                return Err(AnalyticError::Ball(BallError::DivisionByZero));
            }
            prefix *= if f.reciprocal { fac.recip() } else { fac };
            continue;
        }
        let sign = if f.chi && p % 4 == 3 { -1 } else { 1 };
        let den = &cd * &ps;
        let num = if sign > 0 { &den + &cn } else { &den - &cn };
        let x = f64::from(sign) * cf / (p as f64).powi(f.s as i32);
        if f.reciprocal {
            prod.mul(&den, &num, 1.0 / (1.0 + x) - 1.0);
        } else {
            prod.mul(&num, &den, x);
        }
    }
    let partial = prod.finish(wprec);

    // first odd integer beyond the limit
    let n0 = if limit < 3 { 3 } else { (limit + 1) | 1 };
    let n0r = rat(n0 as i64);
    let odd_tail = pow_rational(&n0r, -(s as i64))
        + pow_rational(&n0r, 1 - s as i64) / rat(2 * (s as i64 - 1));
    let xm = c_mag.mul(&Mag::from_rational_upper(&pow_rational(&n0r, -(s as i64))));
    if xm > half {
        return Err(AnalyticError::Invalid("prime limit too small for the tail bound".into()));
    }
    let hi = c_mag
        .mul(&Mag::from_rational_upper(&odd_tail))
        .div(&Mag::one().sub_lower(&xm));
    // without the character every log factor has the sign of c (flipped
    // for reciprocals), so the tail is one-sided
    let tail = if f.chi || f.coef.is_zero() {
        BallReal::from_radius(hi, wprec)
    } else {
        let h = hi.mul_2exp(-1);
        let mid = mag_ball(&h, wprec);
        let positive = f.coef.is_positive() != f.reciprocal;
        let mid = if positive { mid } else { mid.neg() };
        mid.add_error(&h)
    };
    let value = BallReal::from_rational(&prefix, wprec)
        .mul(&partial)
        .mul(&tail.exp()?)
        .with_prec(prec);
    Ok(Enclosure::new(
        value,
        TailBound::new(Technique::IntegralComparison, hi, prec),
        primes.len() as u64,
        prec,
    ))
}
