use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{Corpus, Domain, ErrorKind, Expr, ExprKind, Param, ParseError, Pos};

/// Names that cannot be used as parameters or index variables.
pub const RESERVED: [&str; 20] = [
    "identity", "lhs", "rhs", "param", "in", "expect", "true", "false", "digits", "sum", "prod",
    "inf", "odd_primes", "pi", "sqrt", "cosh", "abs", "euler", "bernoulli_hist", "chi4",
];

fn invalid(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(ErrorKind::Validation, pos, msg)
}

pub(crate) fn validate_corpus(corpus: &Corpus) -> Result<(), ParseError> {
    let mut seen = HashSet::new();
    for id in &corpus.identities {
        if !seen.insert(id.id.as_str()) {
            return Err(invalid(id.pos, format!("duplicate identity id {:?}", id.id)));
        }
        if let Some(p) = &id.param {
            check_binding(&p.name, id.pos)?;
            if p.lo > p.hi {
                return Err(invalid(
                    id.pos,
                    format!("empty parameter range {}..{}", p.lo, p.hi),
                ));
            }
        }
        validate_expr(&id.lhs, id.param.as_ref())?;
        validate_expr(&id.rhs, id.param.as_ref())?;
    }
    Ok(())
}

/// Checks scoping, `chi4` placement and the integrality conditions on
/// exponents, factorials and sequence indices, for every parameter value
/// in the declared range.
pub fn validate_expr(e: &Expr, param: Option<&Param>) -> Result<(), ParseError> {
    let mut scope = Vec::new();
    if let Some(p) = param {
        scope.push(Binding {
            name: p.name.clone(),
            range: Range::between(p.lo, p.hi),
            primes: false,
        });
    }
    check(e, &mut scope)
}

fn check_binding(name: &str, pos: Pos) -> Result<(), ParseError> {
    if RESERVED.contains(&name) {
        return Err(invalid(pos, format!("`{name}` is reserved and cannot be bound")));
    }
    Ok(())
}

#[derive(Clone)]
struct Binding {
    name: String,
    range: Range,
    primes: bool,
}

/// Integer interval; `None` ends are unbounded.
#[derive(Clone, Debug, PartialEq)]
struct Range {
    lo: Option<BigInt>,
    hi: Option<BigInt>,
}

impl Range {
    fn between(lo: i64, hi: i64) -> Self {
        Range {
            lo: Some(lo.into()),
            hi: Some(hi.into()),
        }
    }

    fn point(n: BigInt) -> Self {
        Range {
            lo: Some(n.clone()),
            hi: Some(n),
        }
    }

    fn at_least(n: i64) -> Self {
        Range {
            lo: Some(n.into()),
            hi: None,
        }
    }

    fn any() -> Self {
        Range { lo: None, hi: None }
    }

    fn is_at_least(&self, n: i64) -> bool {
        self.lo.as_ref().is_some_and(|lo| *lo >= BigInt::from(n))
    }

    fn neg(&self) -> Self {
        Range {
            lo: self.hi.as_ref().map(|h| -h),
            hi: self.lo.as_ref().map(|l| -l),
        }
    }

    fn add(&self, o: &Range) -> Self {
        let f = |a: &Option<BigInt>, b: &Option<BigInt>| match (a, b) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Range {
            lo: f(&self.lo, &o.lo),
            hi: f(&self.hi, &o.hi),
        }
    }

    fn mul(&self, o: &Range) -> Self {
        match (&self.lo, &self.hi, &o.lo, &o.hi) {
            (Some(a), Some(b), Some(c), Some(d)) => {
                let prods = [a * c, a * d, b * c, b * d];
                Range {
                    lo: prods.iter().min().cloned(),
                    hi: prods.iter().max().cloned(),
                }
            }
            (Some(a), _, Some(c), _) if !a.is_negative() && !c.is_negative() => Range {
                lo: Some(a * c),
                hi: None,
            },
            _ => Range::any(),
        }
    }
}

/// Integer range of `e`, or `None` if `e` is not provably an integer.
fn int_range(e: &Expr, scope: &[Binding]) -> Option<Range> {
    use ExprKind::*;
    match &e.kind {
        Int(n) => Some(Range::point(n.clone())),
        Var(v) => scope
            .iter()
            .rev()
            .find(|b| &b.name == v)
            .map(|b| b.range.clone()),
        Neg(a) => Some(int_range(a, scope)?.neg()),
        Add(a, b) => Some(int_range(a, scope)?.add(&int_range(b, scope)?)),
        Sub(a, b) => Some(int_range(a, scope)?.add(&int_range(b, scope)?.neg())),
        Mul(a, b) => Some(int_range(a, scope)?.mul(&int_range(b, scope)?)),
        Pow(a, b) => {
            let base = int_range(a, scope)?;
            let exp = int_range(b, scope)?;
            if !exp.is_at_least(0) {
                return None;
            }
            if base == Range::point(-BigInt::one()) {
                return Some(Range::between(-1, 1));
            }
            Some(if base.is_at_least(1) {
                Range::at_least(1)
            } else if base.is_at_least(0) {
                Range::at_least(0)
            } else {
                Range::any()
            })
        }
        Factorial(a) => {
            int_range(a, scope)?;
            Some(Range::at_least(1))
        }
        Abs(a) => {
            int_range(a, scope)?;
            Some(Range::at_least(0))
        }
        Euler(a) => {
            int_range(a, scope)?;
            Some(Range::any())
        }
        Chi4(_) => Some(Range::between(-1, 1)),
        Sum(op) | Prod(op) => match op.domain {
            Domain::Range(lo, hi) => {
                let mut inner = scope.to_vec();
                inner.push(Binding {
                    name: op.var.clone(),
                    range: Range::between(lo, hi),
                    primes: false,
                });
                int_range(&op.body, &inner)?;
                Some(Range::any())
            }
            _ => None,
        },
        Rat(q) => q.is_integer().then(|| Range::point(q.to_integer())),
        Pi | Div(..) | Sqrt(_) | Cosh(_) | BernoulliHist(_) => None,
    }
}

fn need_int(
    arg: &Expr,
    scope: &[Binding],
    min: Option<i64>,
    what: &str,
    pos: Pos,
) -> Result<(), ParseError> {
    let Some(r) = int_range(arg, scope) else {
        return Err(invalid(pos, format!("{what} must be an integer")));
    };
    if let Some(min) = min {
        if !r.is_at_least(min) {
            let bound = if min == 0 {
                "nonnegative".to_string()
            } else {
                format!("at least {min}")
            };
            return Err(invalid(
                pos,
                format!("{what} must be {bound} for every value of its variables"),
            ));
        }
    }
    Ok(())
}

fn check(e: &Expr, scope: &mut Vec<Binding>) -> Result<(), ParseError> {
    use ExprKind::*;
    match &e.kind {
        Int(_) | Rat(_) | Pi => Ok(()),
        Var(v) => {
            if scope.iter().any(|b| &b.name == v) {
                Ok(())
            } else {
                Err(invalid(e.pos, format!("unbound variable `{v}`")))
            }
        }
        Neg(a) | Abs(a) | Sqrt(a) | Cosh(a) => check(a, scope),
        Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
            check(a, scope)?;
            check(b, scope)
        }
        Pow(a, b) => {
            check(a, scope)?;
            check(b, scope)?;
            need_int(b, scope, None, "exponent", b.pos)
        }
        Factorial(a) => {
            check(a, scope)?;
            need_int(a, scope, Some(0), "factorial argument", e.pos)
        }
        Euler(a) => {
            check(a, scope)?;
            need_int(a, scope, Some(0), "Euler number index", e.pos)
        }
        BernoulliHist(a) => {
            check(a, scope)?;
            need_int(a, scope, Some(1), "historical Bernoulli index", e.pos)
        }
        Chi4(a) => {
            if !scope.iter().any(|b| b.primes) {
                return Err(invalid(
                    e.pos,
                    "chi4 is only available inside a sum or product over odd_primes",
                ));
            }
            check(a, scope)?;
            need_int(a, scope, None, "chi4 argument", e.pos)
        }
        Sum(op) | Prod(op) => {
            check_binding(&op.var, e.pos)?;
            if scope.iter().any(|b| b.name == op.var) {
                return Err(invalid(
                    e.pos,
                    format!("index `{}` shadows a variable already in scope", op.var),
                ));
            }
            let (range, primes) = match op.domain {
                Domain::From(lo) => (Range::at_least(lo), false),
                Domain::Range(lo, hi) => {
                    if lo > hi {
                        return Err(invalid(e.pos, format!("empty range {lo}..{hi}")));
                    }
                    (Range::between(lo, hi), false)
                }
                Domain::OddPrimes => (Range::at_least(3), true),
            };
            scope.push(Binding {
                name: op.var.clone(),
                range,
                primes,
            });
            let out = check(&op.body, scope);
            scope.pop();
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn err(src: &str) -> ParseError {
        parse(src).unwrap_err()
    }

    #[test]
    fn unbound_variable_position() {
        let e = err("identity \"x\" { lhs = k; rhs = 1; expect = false; }");
        assert_eq!(e.kind, ErrorKind::Validation);
        assert_eq!(e.pos, Pos { line: 1, col: 22 });
        assert!(e.message.contains("`k`"));
    }

    #[test]
    fn factorial_and_index_rules() {
        assert!(parse(
            "identity \"a\" { lhs = (2*n)!; rhs = abs(euler(2*n)); param n in 0..3; expect = false; }"
        )
        .is_ok());
        let e = err("identity \"a\" { lhs = (n - 1)!; rhs = 1; param n in 0..3; expect = false; }");
        assert!(e.message.contains("nonnegative"), "{}", e.message);
        let e = err("identity \"a\" { lhs = (n/2)!; rhs = 1; param n in 0..3; expect = false; }");
        assert!(e.message.contains("integer"));
        let e = err("identity \"a\" { lhs = bernoulli_hist(n); rhs = 1; param n in 0..3; expect = false; }");
        assert!(e.message.contains("at least 1"));
        let e = err("identity \"a\" { lhs = 2^(1/2); rhs = 1; expect = false; }");
        assert!(e.message.contains("exponent"));
        // index variables are integers, so k! is fine under an infinite domain
        assert!(parse("identity \"e\" { lhs = sum(k, 0..inf, 1/k!); rhs = 1; expect = false; }").is_ok());
    }

    #[test]
    fn chi4_needs_prime_index() {
        assert!(parse(
            "identity \"b\" { lhs = prod(p, odd_primes, p^3 / (p^3 - chi4(p))); rhs = 1; expect = false; }"
        )
        .is_ok());
        let e = err("identity \"b\" { lhs = sum(k, 1..inf, chi4(k) / k^2); rhs = 1; expect = false; }");
        assert!(e.message.contains("odd_primes"));
    }

    #[test]
    fn duplicates_shadowing_and_reserved_names() {
        let e = err(
            "identity \"a\" { lhs = 1; rhs = 1; expect = true; }\n\
             identity \"a\" { lhs = 1; rhs = 1; expect = true; }",
        );
        assert!(e.message.contains("duplicate"));
        assert_eq!(e.pos.line, 2);
        let e = err("identity \"a\" { lhs = sum(n, 1..2, n); rhs = 1; param n in 1..2; expect = true; }");
        assert!(e.message.contains("shadows"));
        let e = err("identity \"a\" { lhs = sum(inf, 1..2, 1); rhs = 1; expect = true; }");
        assert!(e.kind == ErrorKind::Validation || e.kind == ErrorKind::Syntax);
        let e = err("identity \"a\" { lhs = 1; rhs = 1; param n in 3..1; expect = true; }");
        assert!(e.message.contains("empty"));
    }
}
