//! Tree-walking enclosure evaluator. Finite sums and products are summed
//! directly; infinite ones are handed to the analytic evaluators when their
//! shape is recognized, and otherwise truncated (heuristic mode only).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::shape::{one_plus_term, power_term, prime_factor};
use super::{EvalError, Mode};
use crate::analytic::{
    alternating_sum, pairs_for_target, paired_product, power_sum_em, prime_product, Enclosure,
    PowerTerm,
};
use crate::dsl::{BigOp, Domain, Expr, ExprKind};
use crate::exactseq::{bernoulli_hist, euler_numbers, factorial, odd_primes, PrimeStream};
use crate::mpball::{const_pi, BallReal, Mag};

/// Integer variable bindings, innermost last.
#[derive(Clone, Debug, Default)]
pub struct Env(Vec<(String, BigInt)>);

impl Env {
    pub fn new() -> Self {
        Env(Vec::new())
    }

    pub fn with(name: &str, value: i64) -> Self {
        Env(vec![(name.to_string(), value.into())])
    }

    pub fn push(&mut self, name: &str, value: BigInt) {
        self.0.push((name.to_string(), value));
    }

    pub fn pop(&mut self) {
        self.0.pop();
    }

    pub fn get(&self, name: &str) -> Option<&BigInt> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

// exact evaluation gives up beyond these sizes and leaves the node to
// ball arithmetic
const EXACT_MAX_EXPONENT: u64 = 4096;
const EXACT_MAX_RANGE: i64 = 10_000;
const MAX_SEQUENCE_INDEX: u64 = 4096;

/// Exact rational value, when the expression has one that is cheap to
/// compute (no pi, roots, cosh or infinite operators).
pub(crate) fn exact(e: &Expr, env: &Env) -> Option<BigRational> {
    use ExprKind::*;
    let int = |n: BigInt| Some(BigRational::from_integer(n));
    match &e.kind {
        Int(n) => int(n.clone()),
        Rat(q) => Some(q.clone()),
        Var(v) => int(env.get(v)?.clone()),
        Neg(a) => Some(-exact(a, env)?),
        Add(a, b) => Some(exact(a, env)? + exact(b, env)?),
        Sub(a, b) => Some(exact(a, env)? - exact(b, env)?),
        Mul(a, b) => Some(exact(a, env)? * exact(b, env)?),
        Div(a, b) => {
            let d = exact(b, env)?;
            if d.is_zero() {
                return None;
            }
            Some(exact(a, env)? / d)
        }
        Pow(a, b) => {
            let n = exact_int(b, env)?;
            let base = exact(a, env)?;
            let m = n.abs().to_u64().filter(|&m| m <= EXACT_MAX_EXPONENT)?;
            if n.is_negative() && base.is_zero() {
                return None;
            }
            let p = num_traits::pow(base, m as usize);
            Some(if n.is_negative() { p.recip() } else { p })
        }
        Factorial(a) => {
            let n = exact_int(a, env)?.to_u64().filter(|&n| n <= MAX_SEQUENCE_INDEX)?;
            int(factorial(n))
        }
        Euler(a) => int(euler_number(exact_int(a, env)?.to_u64()?)?),
        BernoulliHist(a) => {
            let m = exact_int(a, env)?.to_u64().filter(|&m| m <= MAX_SEQUENCE_INDEX)?;
            bernoulli_hist(m).ok()
        }
        Abs(a) => Some(exact(a, env)?.abs()),
        Chi4(a) => int(chi_mod4(&exact_int(a, env)?).into()),
        Sum(op) | Prod(op) => {
            let Domain::Range(lo, hi) = op.domain else {
                return None;
            };
            if hi.checked_sub(lo)? > EXACT_MAX_RANGE {
                return None;
            }
            let is_sum = matches!(e.kind, Sum(_));
            let mut acc = if is_sum {
                BigRational::zero()
            } else {
                BigRational::one()
            };
            let mut env = env.clone();
            for k in lo..=hi {
                env.push(&op.var, k.into());
                let v = exact(&op.body, &env);
                env.pop();
                let v = v?;
                if is_sum {
                    acc += v;
                } else {
                    acc *= v;
                }
            }
            Some(acc)
        }
        Pi | Sqrt(_) | Cosh(_) => None,
    }
}

pub(crate) fn exact_int(e: &Expr, env: &Env) -> Option<BigInt> {
    let q = exact(e, env)?;
    q.is_integer().then(|| q.to_integer())
}

/// Modern `E_n`; zero for odd `n`.
fn euler_number(n: u64) -> Option<BigInt> {
    if n > MAX_SEQUENCE_INDEX {
        return None;
    }
    if n % 2 == 1 {
        return Some(BigInt::zero());
    }
    let h = (n / 2) as usize;
    Some(euler_numbers(h).swap_remove(h))
}

/// The nontrivial character mod 4 on all integers (zero on even ones).
fn chi_mod4(n: &BigInt) -> i8 {
    match n.mod_floor(&BigInt::from(4)).to_u8() {
        Some(1) => 1,
        Some(3) => -1,
        _ => 0,
    }
}

/// Ball value of an expression that contains no infinite operator.
pub(crate) fn eval_const(e: &Expr, env: &Env, prec: u32) -> Result<BallReal, EvalError> {
    let primes = odd_primes(0);
    let mut ctx = Ctx::new(prec, 1, 1, Mode::Rigorous, &primes);
    ctx.allow_infinite = false;
    ctx.eval(e, &mut env.clone())
}

/// What an evaluation used and where its budget ran out.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Terms summed plus pairs multiplied over integer domains.
    pub terms_used: u64,
    /// Largest prime limit used by an Euler product.
    pub prime_limit: u64,
    /// One line per infinite operator whose term cap was binding.
    pub capped: Vec<String>,
    /// Some value came from truncation without a tail bound.
    pub heuristic: bool,
}

impl Stats {
    pub(crate) fn merge(&mut self, other: Stats) {
        self.terms_used += other.terms_used;
        self.prime_limit = self.prime_limit.max(other.prime_limit);
        for c in other.capped {
            if !self.capped.contains(&c) {
                self.capped.push(c);
            }
        }
        self.heuristic |= other.heuristic;
    }
}

/// Evaluation context for one precision rung.
pub(crate) struct Ctx<'a> {
    /// Working precision in decimal digits.
    prec: u32,
    /// Tails are driven below `10^-(target + 2)`.
    target: u32,
    max_terms: u64,
    prime_limit: u64,
    mode: Mode,
    primes: &'a PrimeStream,
    allow_infinite: bool,
    pub stats: Stats,
}

/// Alternating sums needing more terms than this switch to an
/// Euler-Maclaurin tail.
const DIRECT_SUM_LIMIT: u64 = 100_000;

/// Extra working digits over the rung precision.
const GUARD_DIGITS: u32 = 10;

impl<'a> Ctx<'a> {
    pub(crate) fn new(
        digits: u32,
        max_terms: u64,
        prime_limit: u64,
        mode: Mode,
        primes: &'a PrimeStream,
    ) -> Self {
        Ctx {
            prec: digits + GUARD_DIGITS,
            target: digits,
            max_terms,
            prime_limit: prime_limit.min(primes.limit()),
            mode,
            primes,
            allow_infinite: true,
            stats: Stats::default(),
        }
    }

    fn tail_target(&self) -> f64 {
        10f64.powi(-(self.target as i32 + 2))
    }

    pub(crate) fn eval(&mut self, e: &Expr, env: &mut Env) -> Result<BallReal, EvalError> {
        use ExprKind::*;
        let prec = self.prec;
        let need_int = |x: &Expr, env: &Env, what: &str| {
            exact_int(x, env).ok_or_else(|| EvalError::NotInteger(what.to_string()))
        };
        Ok(match &e.kind {
            Int(n) => BallReal::from_int(n, prec),
            Rat(q) => BallReal::from_rational(q, prec),
            Pi => const_pi(prec),
            Var(v) => BallReal::from_int(
                env.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?,
                prec,
            ),
            Neg(a) => self.eval(a, env)?.neg(),
            Add(a, b) => self.eval(a, env)?.add(&self.eval(b, env)?),
            Sub(a, b) => self.eval(a, env)?.sub(&self.eval(b, env)?),
            Mul(a, b) => self.eval(a, env)?.mul(&self.eval(b, env)?),
            Div(a, b) => self.eval(a, env)?.div(&self.eval(b, env)?)?,
            Pow(a, b) => {
                let n = need_int(b, env, "exponent")?;
                let n = n.to_i64().ok_or(EvalError::TooLarge("exponent"))?;
                match exact(a, env) {
                    Some(q) if n.unsigned_abs() <= EXACT_MAX_EXPONENT && !q.is_zero() => {
                        let p = num_traits::pow(q, n.unsigned_abs() as usize);
                        BallReal::from_rational(&if n < 0 { p.recip() } else { p }, prec)
                    }
                    _ => self.eval(a, env)?.pow_i64(n)?,
                }
            }
            Factorial(a) => {
                let n = need_int(a, env, "factorial argument")?;
                let n = n
                    .to_u64()
                    .filter(|&n| n <= MAX_SEQUENCE_INDEX)
                    .ok_or(EvalError::TooLarge("factorial argument"))?;
                BallReal::from_int(&factorial(n), prec)
            }
            Euler(a) => {
                let n = need_int(a, env, "Euler index")?;
                let e = n
                    .to_u64()
                    .and_then(euler_number)
                    .ok_or(EvalError::TooLarge("Euler index"))?;
                BallReal::from_int(&e, prec)
            }
            BernoulliHist(a) => {
                let m = need_int(a, env, "Bernoulli index")?;
                let m = m
                    .to_u64()
                    .filter(|&m| m <= MAX_SEQUENCE_INDEX)
                    .ok_or(EvalError::TooLarge("Bernoulli index"))?;
                BallReal::from_rational(&bernoulli_hist(m)?, prec)
            }
            Abs(a) => self.eval(a, env)?.abs(),
            Sqrt(a) => self.eval(a, env)?.sqrt()?,
            Cosh(a) => self.eval(a, env)?.cosh()?,
            Chi4(a) => {
                let n = need_int(a, env, "chi4 argument")?;
                BallReal::from_i64(chi_mod4(&n).into(), prec)
            }
            Sum(op) | Prod(op) => {
                let is_sum = matches!(e.kind, Sum(_));
                match op.domain {
                    Domain::Range(lo, hi) => self.finite(op, lo, hi, is_sum, env)?,
                    _ if !self.allow_infinite => {
                        return Err(EvalError::Unsupported(
                            "infinite operator inside the constant part of a term".into(),
                        ))
                    }
                    Domain::From(start) => self.infinite_integers(op, start, is_sum, env)?,
                    Domain::OddPrimes => self.over_primes(op, is_sum, env)?,
                }
            }
        })
    }

    fn finite(
        &mut self,
        op: &BigOp,
        lo: i64,
        hi: i64,
        is_sum: bool,
        env: &mut Env,
    ) -> Result<BallReal, EvalError> {
        let mut acc = BallReal::from_i64(i64::from(!is_sum), self.prec);
        for k in lo..=hi {
            env.push(&op.var, k.into());
            let v = self.eval(&op.body, env);
            env.pop();
            acc = if is_sum { acc.add(&v?) } else { acc.mul(&v?) };
        }
        Ok(acc)
    }

    fn unrecognized(&self, what: String) -> EvalError {
        EvalError::Unrecognized(what)
    }

    fn infinite_integers(
        &mut self,
        op: &BigOp,
        start: i64,
        is_sum: bool,
        env: &mut Env,
    ) -> Result<BallReal, EvalError> {
        let k = op.var.as_str();
        if is_sum {
            if let Some(t) = power_term(&op.body, k, env, self.prec) {
                if t.alternating || t.s >= 2 {
                    let enc = self.power_sum(&t, start)?;
                    self.stats.terms_used += enc.terms;
                    return Ok(enc.value);
                }
            }
        } else if let Some(t) = one_plus_term(&op.body, k, env, self.prec) {
            if t.alternating {
                return self.paired(&t, start);
            }
        }
        if self.mode == Mode::Heuristic {
            return self.truncated(op, is_sum, env, Some(start));
        }
        Err(self.unrecognized(format!(
            "no rigorous tail bound for {} over {k} >= {start}",
            if is_sum { "this sum" } else { "this product" }
        )))
    }

    /// Alternating sums use the first omitted term when the cap allows
    /// enough terms, and an Euler-Maclaurin tail otherwise; positive sums
    /// always use Euler-Maclaurin.
    fn power_sum(&mut self, t: &PowerTerm, start: i64) -> Result<Enclosure, EvalError> {
        if t.alternating {
            let l_needed = (t.coef_f64() / self.tail_target()).powf(1.0 / f64::from(t.s));
            let alpha = t.alpha.to_f64().unwrap_or(1.0);
            let n = ((l_needed - t.lin_f64(start as f64)) / alpha).ceil().max(1.0);
            if n <= self.max_terms.min(DIRECT_SUM_LIMIT) as f64 {
                return Ok(alternating_sum(t, start, n as u64, self.prec)?);
            }
        }
        Ok(power_sum_em(t, start, self.prec)?)
    }

    fn paired(&mut self, t: &PowerTerm, start: i64) -> Result<BallReal, EvalError> {
        let want = pairs_for_target(t, start, self.tail_target());
        let pairs = if want > self.max_terms as f64 {
            self.stats.capped.push(format!(
                "paired product limited to {} pairs",
                self.max_terms
            ));
            self.max_terms
        } else {
            want as u64
        };
        let enc = paired_product(t, start, pairs, self.prec)?;
        self.stats.terms_used += enc.terms;
        Ok(enc.value)
    }

    fn over_primes(
        &mut self,
        op: &BigOp,
        is_sum: bool,
        env: &mut Env,
    ) -> Result<BallReal, EvalError> {
        if !is_sum {
            if let Some(f) = prime_factor(&op.body, &op.var, env) {
                if f.s >= 2 {
                    let c = Mag::from_rational_upper(&f.coef).to_f64().max(1e-300);
                    let s = f64::from(f.s);
                    // |log tail| is about c n0^{1-s} / (2 (s - 1))
                    let n0 = (c / (2.0 * (s - 1.0) * self.tail_target())).powf(1.0 / (s - 1.0));
                    let limit = if n0 > self.prime_limit as f64 {
                        self.stats.capped.push(format!(
                            "prime product limited to primes up to {}",
                            self.prime_limit
                        ));
                        self.prime_limit
                    } else {
                        (n0.ceil() as u64).max(3)
                    };
                    let primes = self.primes.up_to(limit);
                    let enc = prime_product(&f, primes, limit, self.prec)?;
                    self.stats.prime_limit = self.stats.prime_limit.max(limit);
                    return Ok(enc.value);
                }
            }
        }
        if self.mode == Mode::Heuristic {
            return self.truncated(op, is_sum, env, None);
        }
        Err(self.unrecognized(format!(
            "no rigorous tail bound for this {} over the odd primes",
            if is_sum { "sum" } else { "product" }
        )))
    }

    /// Heuristic value: partial sums or products with doubling length until
    /// two consecutive ones agree to the target, radius set to their
    /// difference. Not an enclosure.
    fn truncated(
        &mut self,
        op: &BigOp,
        is_sum: bool,
        env: &mut Env,
        start: Option<i64>,
    ) -> Result<BallReal, EvalError> {
        self.stats.heuristic = true;
        let cap = match start {
            Some(_) => self.max_terms,
            None => self.primes.up_to(self.prime_limit).len() as u64,
        };
        let index = |i: u64| -> BigInt {
            match start {
                Some(s) => BigInt::from(s) + i,
                None => BigInt::from(self.primes.as_slice()[i as usize]),
            }
        };
        if cap == 0 {
            return Err(EvalError::Unsupported("empty truncation budget".into()));
        }
        let tol = Mag::from_f64_upper(10f64.powi(-(self.target as i32)));
        let mut acc = BallReal::from_i64(i64::from(!is_sum), self.prec);
        let mut done = 0u64;
        let mut len = 64u64.min(cap);
        let mut prev: Option<BallReal> = None;
        let diff = loop {
            while done < len {
                env.push(&op.var, index(done));
                let v = self.eval(&op.body, env);
                env.pop();
                acc = if is_sum { acc.add(&v?) } else { acc.mul(&v?) };
                done += 1;
            }
            let diff = prev.as_ref().map(|p| acc.mid_distance(p));
            if let Some(d) = &diff {
                if *d <= tol {
                    break *d;
                }
            }
            if done >= cap {
                self.stats
                    .capped
                    .push(format!("heuristic truncation stopped at {done} terms"));
                break diff.unwrap_or_else(|| acc.mag_upper());
            }
            prev = Some(acc.clone());
            len = (len * 2).min(cap);
        };
        match start {
            Some(_) => self.stats.terms_used += done,
            None => {
                let last = self.primes.as_slice()[done as usize - 1];
                self.stats.prime_limit = self.stats.prime_limit.max(last);
            }
        }
        Ok(acc.mid().add_error(&diff.add(&acc.rad())))
    }
}
