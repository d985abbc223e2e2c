use std::fmt::Write;

use num_traits::Signed;

use super::{Corpus, Domain, Expect, Expr, ExprKind};

// binding strength of the printed form
const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const POSTFIX: u8 = 4;
const ATOM: u8 = 5;

/// Canonical text of a corpus; reparses to an equal corpus.
pub fn print(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (i, id) in corpus.identities.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "identity {} {{", quote(&id.id));
        let _ = writeln!(out, "  lhs = {};", print_expr(&id.lhs));
        let _ = writeln!(out, "  rhs = {};", print_expr(&id.rhs));
        if let Some(p) = &id.param {
            let _ = writeln!(out, "  param {} in {}..{};", p.name, p.lo, p.hi);
        }
        match id.expect {
            Expect::Confirmed(d) => {
                let _ = writeln!(out, "  expect = true >= {d} digits;");
            }
            Expect::Refuted => out.push_str("  expect = false;\n"),
        }
        out.push_str("}\n");
    }
    out
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}

pub fn print_expr(e: &Expr) -> String {
    render(e).0
}

fn wrap(e: &Expr, min: u8) -> String {
    let (s, level) = render(e);
    if level >= min {
        s
    } else {
        format!("({s})")
    }
}

/// Operand of `^` (as base) or `!`: an atom or another factorial.
fn postfix_operand(e: &Expr) -> String {
    match e.kind {
        ExprKind::Factorial(_) => render(e).0,
        _ => wrap(e, ATOM),
    }
}

fn call(name: &str, arg: &Expr) -> (String, u8) {
    (format!("{name}({})", render(arg).0), ATOM)
}

fn render(e: &Expr) -> (String, u8) {
    use ExprKind::*;
    match &e.kind {
        Int(n) if n.is_negative() => (format!("({n})"), ATOM),
        Int(n) => (n.to_string(), ATOM),
        Rat(q) => (format!("({}/{})", q.numer(), q.denom()), ATOM),
        Pi => ("pi".to_string(), ATOM),
        Var(v) => (v.clone(), ATOM),
        Neg(a) => (format!("-{}", wrap(a, POSTFIX)), UNARY),
        Add(a, b) => (format!("{} + {}", wrap(a, ADD), wrap(b, MUL)), ADD),
        Sub(a, b) => (format!("{} - {}", wrap(a, ADD), wrap(b, MUL)), ADD),
        Mul(a, b) => (format!("{}*{}", wrap(a, MUL), wrap(b, UNARY)), MUL),
        Div(a, b) => (format!("{}/{}", wrap(a, MUL), wrap(b, UNARY)), MUL),
        Pow(a, b) => (format!("{}^{}", postfix_operand(a), wrap(b, UNARY)), POSTFIX),
        Factorial(a) => (format!("{}!", postfix_operand(a)), POSTFIX),
        Abs(a) => call("abs", a),
        Sqrt(a) => call("sqrt", a),
        Cosh(a) => call("cosh", a),
        Euler(a) => call("euler", a),
        BernoulliHist(a) => call("bernoulli_hist", a),
        Chi4(a) => call("chi4", a),
        Sum(op) | Prod(op) => {
            let name = if matches!(e.kind, Sum(_)) { "sum" } else { "prod" };
            let dom = match op.domain {
                Domain::From(lo) => format!("{lo}..inf"),
                Domain::Range(lo, hi) => format!("{lo}..{hi}"),
                Domain::OddPrimes => "odd_primes".to_string(),
            };
            (
                format!("{name}({}, {dom}, {})", op.var, render(&op.body).0),
                ATOM,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, parse_expr};
    use super::*;

    #[test]
    fn reprints_minimal_parentheses() {
        let e = parse_expr("1 - (-1)^k / (2*k+1)^3", None);
        assert!(e.is_err(), "k is unbound without a binder");
        let src = "prod(k, 1..inf, 1 - (-1)^k / (2*k+1)^3)";
        let e = parse_expr(src, None).unwrap();
        assert_eq!(print_expr(&e), "prod(k, 1..inf, 1 - (-1)^k/(2*k + 1)^3)");
        assert_eq!(parse_expr(&print_expr(&e), None).unwrap(), e);
    }

    #[test]
    fn tricky_shapes_round_trip() {
        for src in [
            "(2^3)^2",
            "2^3^2",
            "-(2^3)!",
            "(3!)^2",
            "3!!",
            "2^-(1+1)",
            "-(-pi)",
            "1 - (2 - 3)",
            "1/(2/3)",
            "1/(2*3)",
            "-pi^2",
            "(-pi)^2",
            "2^(3!)",
            "(2^3)!",
            "sum(j, -2..2, j^2)",
        ] {
            let e = parse_expr(src, None).unwrap();
            let printed = print_expr(&e);
            assert_eq!(parse_expr(&printed, None).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn corpus_text() {
        assert_eq!(print(&Corpus::default()), "");
        let src = "identity \"a\\\"b\" { lhs = n; rhs = 2*n/2; param n in -1..2; expect = true; }";
        let c = parse(src).unwrap();
        let text = print(&c);
        assert_eq!(
            text,
            "identity \"a\\\"b\" {\n  lhs = n;\n  rhs = 2*n/2;\n  param n in -1..2;\n  expect = true >= 8 digits;\n}\n"
        );
        assert_eq!(parse(&text).unwrap(), c);
    }
}
