//! Random well-formed corpora for round-trip tests.

use eulercheck::dsl::{BigOp, Corpus, Domain, Expect, Expr, ExprKind, Identity, Param, Pos};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Random well-formed trees. Every generated corpus passes validation, so
/// the round trip exercises the printer on valid input only.
struct Gen {
    rng: StdRng,
    fresh: u32,
    // (name, lower bound) of variables in scope; a prime index has bound 3
    scope: Vec<(String, i64)>,
    primes: Option<String>,
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Gen {
    fn int_lit(&mut self, lo: i64, hi: i64) -> Expr {
        Expr::int(self.rng.gen_range(lo..=hi))
    }

    fn real(&mut self, depth: u32) -> Expr {
        use ExprKind::*;
        if depth == 0 {
            return self.leaf();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..18) {
            0 => self.leaf(),
            1 => {
                let a = self.real(d);
                if matches!(a.kind, Int(_)) {
                    Expr::new(Neg(b(Expr::new(Pi))))
                } else {
                    Expr::new(Neg(b(a)))
                }
            }
            2 => Expr::new(Add(b(self.real(d)), b(self.real(d)))),
            3 => Expr::new(Sub(b(self.real(d)), b(self.real(d)))),
            4 => Expr::new(Mul(b(self.real(d)), b(self.real(d)))),
            5 => Expr::new(Div(b(self.real(d)), b(self.real(d)))),
            6 => Expr::new(Pow(b(self.real(d)), b(self.int(d)))),
            7 => Expr::new(Factorial(b(self.nonneg(d)))),
            8 => Expr::new(Abs(b(self.real(d)))),
            9 => Expr::new(Sqrt(b(self.real(d)))),
            10 => Expr::new(Cosh(b(self.real(d)))),
            11 => Expr::new(Euler(b(self.nonneg(d)))),
            12 => {
                let one = Expr::int(1);
                Expr::new(BernoulliHist(b(Expr::new(Add(b(self.nonneg(d)), b(one))))))
            }
            13 if self.primes.is_some() => {
                let p = self.primes.clone().unwrap();
                Expr::new(Chi4(b(Expr::var(&p))))
            }
            14 | 15 => self.bigop(d, true),
            16 | 17 => self.bigop(d, false),
            _ => self.leaf(),
        }
    }

    fn bigop(&mut self, depth: u32, sum: bool) -> Expr {
        self.fresh += 1;
        let var = format!("i{}", self.fresh);
        let (domain, lo) = match self.rng.gen_range(0..3) {
            0 => {
                let s = self.rng.gen_range(-2..4);
                (Domain::From(s), s)
            }
            1 => {
                let lo = self.rng.gen_range(-3..3);
                (Domain::Range(lo, lo + self.rng.gen_range(0..4)), lo)
            }
            _ => (Domain::OddPrimes, 3),
        };
        let outer = self.primes.clone();
        if domain == Domain::OddPrimes {
            self.primes = Some(var.clone());
        }
        self.scope.push((var.clone(), lo));
        let body = self.real(depth);
        self.scope.pop();
        self.primes = outer;
        let op = BigOp {
            var,
            domain,
            body: b(body),
        };
        Expr::new(if sum { ExprKind::Sum(op) } else { ExprKind::Prod(op) })
    }

    fn leaf(&mut self) -> Expr {
        match self.rng.gen_range(0..4) {
            0 => Expr::new(ExprKind::Pi),
            1 if !self.scope.is_empty() => {
                let i = self.rng.gen_range(0..self.scope.len());
                Expr::var(&self.scope[i].0.clone())
            }
            _ => self.int_lit(-20, 20),
        }
    }

    fn int(&mut self, depth: u32) -> Expr {
        use ExprKind::*;
        if depth == 0 || self.rng.gen_bool(0.4) {
            if !self.scope.is_empty() && self.rng.gen_bool(0.5) {
                let i = self.rng.gen_range(0..self.scope.len());
                return Expr::var(&self.scope[i].0.clone());
            }
            return self.int_lit(-5, 5);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..4) {
            0 => Expr::new(Add(b(self.int(d)), b(self.int(d)))),
            1 => Expr::new(Sub(b(self.int(d)), b(self.int(d)))),
            2 => Expr::new(Mul(b(self.int(d)), b(self.int(d)))),
            _ => {
                // a negated literal would reparse as a negative literal
                let a = Expr::new(Add(b(self.int(d)), b(self.int(d))));
                Expr::new(Neg(b(a)))
            }
        }
    }

    fn nonneg(&mut self, depth: u32) -> Expr {
        use ExprKind::*;
        let vars: Vec<String> = self
            .scope
            .iter()
            .filter(|(_, lo)| *lo >= 0)
            .map(|(n, _)| n.clone())
            .collect();
        if depth == 0 || self.rng.gen_bool(0.4) {
            if !vars.is_empty() && self.rng.gen_bool(0.5) {
                return Expr::var(&vars[self.rng.gen_range(0..vars.len())]);
            }
            return self.int_lit(0, 8);
        }
        let d = depth - 1;
        if self.rng.gen_bool(0.5) {
            Expr::new(Add(b(self.nonneg(d)), b(self.nonneg(d))))
        } else {
            Expr::new(Mul(b(self.nonneg(d)), b(self.nonneg(d))))
        }
    }
}

fn id_text(rng: &mut StdRng, i: usize) -> String {
    let pool = ['a', 'Z', '_', ' ', '"', '\\', '-', '7', 'é'];
    let mut s: String = (0..rng.gen_range(0..6))
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect();
    s.push_str(&i.to_string());
    s
}

pub fn corpus(seed: u64) -> Corpus {
    let mut g = Gen {
        rng: StdRng::seed_from_u64(seed),
        fresh: 0,
        scope: Vec::new(),
        primes: None,
    };
    let n = g.rng.gen_range(0..5);
    let mut identities = Vec::new();
    for i in 0..n {
        let param = g.rng.gen_bool(0.6).then(|| {
            let lo = g.rng.gen_range(-3..4);
            Param {
                name: "n".to_string(),
                lo,
                hi: lo + g.rng.gen_range(0..4),
            }
        });
        g.scope = param.iter().map(|p| (p.name.clone(), p.lo)).collect();
        let depth = g.rng.gen_range(0..5);
        let lhs = g.real(depth);
        let rhs = g.real(depth);
        let expect = if g.rng.gen_bool(0.5) {
            Expect::Confirmed(g.rng.gen_range(4..60))
        } else {
            Expect::Refuted
        };
        identities.push(Identity {
            id: id_text(&mut g.rng, i),
            lhs,
            rhs,
            param,
            expect,
            pos: Pos::default(),
        });
    }
    Corpus { identities }
}
