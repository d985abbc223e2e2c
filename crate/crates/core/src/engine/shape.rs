//! Recognizers for the infinite sums and products that have rigorous
//! evaluators: power terms `c (-1)^k / L(k)^s` over the integers and
//! `1 + c chi4(p) p^-s` (or its reciprocal) over the odd primes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::eval::{exact, Env};
use crate::analytic::{Coef, PowerTerm, PrimeFactor};
use crate::dsl::{Expr, ExprKind};
use crate::mpball::BallReal;

/// `a k + b` with exact coefficients.
type Linear = (BigRational, BigRational);

fn linear(e: &Expr, k: &str, env: &Env) -> Option<Linear> {
    use ExprKind::*;
    if !e.mentions(k) {
        return Some((BigRational::zero(), exact(e, env)?));
    }
    match &e.kind {
        Var(v) if v == k => Some((BigRational::one(), BigRational::zero())),
        Neg(a) => {
            let (p, q) = linear(a, k, env)?;
            Some((-p, -q))
        }
        Add(a, b) | Sub(a, b) => {
            let (p1, q1) = linear(a, k, env)?;
            let (p2, q2) = linear(b, k, env)?;
            if matches!(e.kind, Add(..)) {
                Some((p1 + p2, q1 + q2))
            } else {
                Some((p1 - p2, q1 - q2))
            }
        }
        Mul(a, b) => {
            let (p1, q1) = linear(a, k, env)?;
            let (p2, q2) = linear(b, k, env)?;
            if p1.is_zero() {
                Some((&q1 * p2, q1 * q2))
            } else if p2.is_zero() {
                Some((&q2 * p1, q2 * q1))
            } else {
                None
            }
        }
        Div(a, b) if !b.mentions(k) => {
            let d = exact(b, env)?;
            if d.is_zero() {
                return None;
            }
            let (p, q) = linear(a, k, env)?;
            Some((p / &d, q / d))
        }
        _ => None,
    }
}

/// Scales `a k + b` to coprime integers with `a > 0`; returns the form and
/// the factor `lambda` with `original = lambda * normalized`.
fn normalize(l: &Linear) -> Option<(Linear, BigRational)> {
    let (a, b) = l;
    if !a.is_positive() {
        return None;
    }
    let den = a.denom().lcm(b.denom());
    let an = (a * BigRational::from_integer(den.clone())).to_integer();
    let bn = (b * BigRational::from_integer(den.clone())).to_integer();
    let g = an.gcd(&bn);
    let an = &an / &g;
    let bn = &bn / &g;
    let lambda = BigRational::new(g, den);
    Some((
        (BigRational::from_integer(an), BigRational::from_integer(bn)),
        lambda,
    ))
}

#[derive(Default)]
struct TermParts {
    coef: Option<BigRational>,
    coef_ball: Option<BallReal>,
    alternating: bool,
    negative: bool,
    form: Option<Linear>,
    form_exp: i64,
}

impl TermParts {
    fn scale_exact(&mut self, q: BigRational) {
        let c = self.coef.take().unwrap_or_else(BigRational::one);
        self.coef = Some(c * q);
    }

    fn add_form(&mut self, l: &Linear, exp: i64) -> Option<()> {
        let (norm, lambda) = normalize(l)?;
        match &self.form {
            Some(f) if *f != norm => return None,
            _ => self.form = Some(norm),
        }
        self.form_exp += exp;
        self.scale_exact(pow_q(&lambda, exp)?);
        Some(())
    }

    fn walk(&mut self, e: &Expr, k: &str, env: &Env, exp: i64, prec: u32) -> Option<()> {
        use ExprKind::*;
        if !e.mentions(k) {
            if let Some(q) = exact(e, env) {
                self.scale_exact(pow_q(&q, exp)?);
                return Some(());
            }
            let v = super::eval::eval_const(e, env, prec).ok()?;
            let v = if exp == 1 { v } else { v.recip().ok()? };
            self.coef_ball = Some(match self.coef_ball.take() {
                Some(b) => b.mul(&v),
                None => v,
            });
            return Some(());
        }
        match &e.kind {
            Mul(a, b) => {
                self.walk(a, k, env, exp, prec)?;
                self.walk(b, k, env, exp, prec)
            }
            Div(a, b) => {
                self.walk(a, k, env, exp, prec)?;
                self.walk(b, k, env, -exp, prec)
            }
            Neg(a) => {
                self.negative = !self.negative;
                self.walk(a, k, env, exp, prec)
            }
            Pow(base, ex) if is_minus_one(base) => {
                let (a, b) = linear(ex, k, env)?;
                if !a.is_integer() || !b.is_integer() {
                    return None;
                }
                if a.to_integer().is_odd() {
                    self.alternating = !self.alternating;
                }
                if b.to_integer().is_odd() {
                    self.negative = !self.negative;
                }
                Some(())
            }
            Pow(base, ex) if !ex.mentions(k) => {
                let n = exact(ex, env)?;
                if !n.is_integer() {
                    return None;
                }
                let n = n.to_integer().to_i64()?;
                self.add_form(&linear(base, k, env)?, exp * n)
            }
            _ => self.add_form(&linear(e, k, env)?, exp),
        }
    }
}

fn is_minus_one(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Int(n) if *n == BigInt::from(-1))
}

fn pow_q(q: &BigRational, e: i64) -> Option<BigRational> {
    if e < 0 && q.is_zero() {
        return None;
    }
    let n = usize::try_from(e.unsigned_abs()).ok()?;
    let p = num_traits::pow(q.clone(), n);
    Some(if e < 0 { p.recip() } else { p })
}

/// Matches `c (-1)^k / L(k)^s` in the index `k`, with `c` free of `k`.
pub(crate) fn power_term(e: &Expr, k: &str, env: &Env, prec: u32) -> Option<PowerTerm> {
    let mut parts = TermParts::default();
    parts.walk(e, k, env, 1, prec)?;
    let (alpha, beta) = parts.form?;
    let s = u32::try_from(-parts.form_exp).ok().filter(|&s| s >= 1)?;
    let mut q = parts.coef.unwrap_or_else(BigRational::one);
    if parts.negative {
        q = -q;
    }
    let coef = match parts.coef_ball {
        None => Coef::Exact(q),
        Some(b) => Coef::Ball(b.mul(&BallReal::from_rational(&q, prec))),
    };
    Some(PowerTerm {
        coef,
        alternating: parts.alternating,
        alpha,
        beta,
        s,
    })
}

/// Matches `1 + x`, `x + 1` or `1 - x` and returns `x` as a power term.
pub(crate) fn one_plus_term(e: &Expr, k: &str, env: &Env, prec: u32) -> Option<PowerTerm> {
    let is_one = |x: &Expr| !x.mentions(k) && exact(x, env).is_some_and(|q| q.is_one());
    let (x, negate) = match &e.kind {
        ExprKind::Add(a, b) if is_one(a) => (b, false),
        ExprKind::Add(a, b) if is_one(b) => (a, false),
        ExprKind::Sub(a, b) if is_one(a) => (b, true),
        _ => return None,
    };
    let mut t = power_term(x, k, env, prec)?;
    if negate {
        t.coef = match t.coef {
            Coef::Exact(q) => Coef::Exact(-q),
            Coef::Ball(b) => Coef::Ball(b.neg()),
        };
    }
    Some(t)
}

/// `coef * chi4(p)^[chi] * p^pexp`.
#[derive(Clone, Debug, PartialEq)]
struct Mono {
    coef: BigRational,
    chi: bool,
    pexp: i64,
}

impl Mono {
    fn mul(&self, o: &Mono) -> Mono {
        Mono {
            coef: &self.coef * &o.coef,
            chi: self.chi != o.chi,
            pexp: self.pexp + o.pexp,
        }
    }

    fn div(&self, o: &Mono) -> Option<Mono> {
        if o.coef.is_zero() {
            return None;
        }
        Some(Mono {
            coef: &self.coef / &o.coef,
            // chi4(p)^2 = 1 on odd primes
            chi: self.chi != o.chi,
            pexp: self.pexp - o.pexp,
        })
    }
}

fn mono(e: &Expr, p: &str, env: &Env) -> Option<Mono> {
    use ExprKind::*;
    if !e.mentions(p) {
        return Some(Mono {
            coef: exact(e, env)?,
            chi: false,
            pexp: 0,
        });
    }
    match &e.kind {
        Var(v) if v == p => Some(Mono {
            coef: BigRational::one(),
            chi: false,
            pexp: 1,
        }),
        Chi4(a) if matches!(&a.kind, Var(v) if v == p) => Some(Mono {
            coef: BigRational::one(),
            chi: true,
            pexp: 0,
        }),
        Neg(a) => {
            let mut m = mono(a, p, env)?;
            m.coef = -m.coef;
            Some(m)
        }
        Mul(a, b) => Some(mono(a, p, env)?.mul(&mono(b, p, env)?)),
        Div(a, b) => mono(a, p, env)?.div(&mono(b, p, env)?),
        Pow(a, ex) if !ex.mentions(p) => {
            let n = exact(ex, env)?;
            if !n.is_integer() {
                return None;
            }
            let n = n.to_integer().to_i64()?;
            let m = mono(a, p, env)?;
            Some(Mono {
                coef: pow_q(&m.coef, n)?,
                chi: m.chi && n % 2 != 0,
                pexp: m.pexp * n,
            })
        }
        _ => None,
    }
}

fn poly(e: &Expr, p: &str, env: &Env) -> Option<Vec<Mono>> {
    use ExprKind::*;
    match &e.kind {
        Add(a, b) => {
            let mut v = poly(a, p, env)?;
            v.extend(poly(b, p, env)?);
            Some(v)
        }
        Sub(a, b) => {
            let mut v = poly(a, p, env)?;
            v.extend(poly(b, p, env)?.into_iter().map(|mut m| {
                m.coef = -m.coef;
                m
            }));
            Some(v)
        }
        _ => Some(vec![mono(e, p, env)?]),
    }
}

/// `sum m_i / d` with like terms merged and zeros dropped.
fn divide_all(ms: &[Mono], d: &Mono) -> Option<Vec<Mono>> {
    let mut out: Vec<Mono> = Vec::new();
    for m in ms {
        let q = m.div(d)?;
        match out.iter_mut().find(|o| o.chi == q.chi && o.pexp == q.pexp) {
            Some(o) => o.coef += q.coef,
            None => out.push(q),
        }
    }
    out.retain(|m| !m.coef.is_zero());
    Some(out)
}

/// `1 + x` from a list of two monomials, one of them the constant 1.
fn one_plus(ms: &[Mono]) -> Option<&Mono> {
    let one = Mono {
        coef: BigRational::one(),
        chi: false,
        pexp: 0,
    };
    match ms {
        [a, b] if *a == one => Some(b),
        [a, b] if *b == one => Some(a),
        _ => None,
    }
}

/// Matches an Euler-product factor in the prime `p`: `1 + c chi4(p) p^-s`,
/// its reciprocal, or any quotient of monomial sums that reduces to one of
/// these (such as `p^s / (p^s - chi4(p))`).
pub(crate) fn prime_factor(e: &Expr, p: &str, env: &Env) -> Option<PrimeFactor> {
    let (num, den) = match &e.kind {
        ExprKind::Div(a, b) => (poly(a, p, env)?, poly(b, p, env)?),
        _ => (poly(e, p, env)?, vec![mono(&Expr::int(1), p, env)?]),
    };
    let (terms, reciprocal) = if den.len() == 1 {
        (divide_all(&num, &den[0])?, false)
    } else if num.len() == 1 {
        (divide_all(&den, &num[0])?, true)
    } else {
        return None;
    };
    let x = one_plus(&terms)?;
    let s = u32::try_from(-x.pexp).ok().filter(|&s| s >= 1)?;
    Some(PrimeFactor {
        coef: x.coef.clone(),
        chi: x.chi,
        s,
        reciprocal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_expr;

    fn body(src: &str) -> (Expr, String) {
        let e = parse_expr(src, None).unwrap();
        match e.kind {
            ExprKind::Sum(op) | ExprKind::Prod(op) => (*op.body, op.var),
            _ => panic!("not a big operator"),
        }
    }

    fn exact_coef(t: &PowerTerm) -> BigRational {
        match &t.coef {
            Coef::Exact(q) => q.clone(),
            Coef::Ball(_) => panic!("inexact coefficient"),
        }
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn power_terms() {
        let env = Env::default();
        let (b, k) = body("sum(k, 0..inf, (-1)^k / (2*k + 1)^9)");
        let t = power_term(&b, &k, &env, 20).unwrap();
        assert!(t.alternating);
        assert_eq!((t.alpha.clone(), t.beta.clone(), t.s), (q(2, 1), q(1, 1), 9));
        assert_eq!(exact_coef(&t), q(1, 1));

        // (k/2 + 1/2)^-2 = 4 (k + 1)^-2, sign from (-1)^(k+1)
        let (b, k) = body("sum(k, 0..inf, 3*(-1)^(k+1) / (k/2 + 1/2)^2)");
        let t = power_term(&b, &k, &env, 20).unwrap();
        assert_eq!((t.alpha.clone(), t.beta.clone(), t.s), (q(1, 1), q(1, 1), 2));
        assert_eq!(exact_coef(&t), q(-12, 1));

        let (b, k) = body("sum(k, 1..inf, pi / k^2)");
        let t = power_term(&b, &k, &env, 20).unwrap();
        assert!(matches!(t.coef, Coef::Ball(_)));
        assert!(!t.alternating);

        for src in [
            "sum(k, 1..inf, 1/k!)",
            "sum(k, 1..inf, 1/(k^2 + 1))",
            "sum(k, 1..inf, k)",
            "sum(k, 1..inf, 1/(k*(k+1)))",
            "sum(k, 1..inf, 2^k)",
        ] {
            let (b, k) = body(src);
            assert!(power_term(&b, &k, &env, 20).is_none(), "{src}");
        }
    }

    #[test]
    fn product_factors() {
        let env = Env::default();
        let (b, k) = body("prod(k, 1..inf, 1 - (-1)^k / (2*k + 1)^3)");
        let t = one_plus_term(&b, &k, &env, 20).unwrap();
        assert_eq!(exact_coef(&t), q(-1, 1));
        assert!(t.alternating);

        let (b, p) = body("prod(p, odd_primes, p^5 / (p^5 - chi4(p)))");
        let f = prime_factor(&b, &p, &env).unwrap();
        assert_eq!((f.coef.clone(), f.chi, f.s, f.reciprocal), (q(-1, 1), true, 5, true));

        let (b, p) = body("prod(p, odd_primes, 1 - chi4(p) / p^3)");
        let f = prime_factor(&b, &p, &env).unwrap();
        assert_eq!((f.coef.clone(), f.chi, f.s, f.reciprocal), (q(-1, 1), true, 3, false));

        let (b, p) = body("prod(p, odd_primes, (p^2 + 2) / p^2)");
        let f = prime_factor(&b, &p, &env).unwrap();
        assert_eq!((f.coef.clone(), f.chi, f.s, f.reciprocal), (q(2, 1), false, 2, false));

        let (b, p) = body("prod(p, odd_primes, 1 / (1 - 1/p^4))");
        let f = prime_factor(&b, &p, &env).unwrap();
        assert_eq!((f.coef.clone(), f.chi, f.s, f.reciprocal), (q(-1, 1), false, 4, true));

        for src in [
            "prod(p, odd_primes, 1 + p)",
            "prod(p, odd_primes, 2 - 1/p^2)",
            "prod(p, odd_primes, (p^2 - 1) / (p^2 + 1))",
            "prod(p, odd_primes, 1 + pi/p^2)",
        ] {
            let (b, p) = body(src);
            assert!(prime_factor(&b, &p, &env).is_none(), "{src}");
        }
    }
}
