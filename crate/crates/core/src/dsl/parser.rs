use num_traits::ToPrimitive;

use super::lexer::{lex, Tok, Token};
use super::validate::{validate_corpus, validate_expr};
use super::{
    BigOp, Corpus, Domain, ErrorKind, Expect, Expr, ExprKind, Identity, Param, ParseError, Pos,
    DEFAULT_MIN_DIGITS,
};

/// Parses and validates a corpus.
pub fn parse(src: &str) -> Result<Corpus, ParseError> {
    let mut p = Parser::new(src)?;
    let mut identities = Vec::new();
    while p.peek() != &Tok::Eof {
        identities.push(p.identity()?);
    }
    let corpus = Corpus { identities };
    validate_corpus(&corpus)?;
    Ok(corpus)
}

/// Parses a bare expression (an identity side) and validates it with
/// `param` as the only free variable.
pub fn parse_expr(src: &str, param: Option<&Param>) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    validate_expr(&e, param)?;
    Ok(e)
}

const BUILTINS: [&str; 6] = ["sqrt", "cosh", "abs", "euler", "bernoulli_hist", "chi4"];

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::new(
            ErrorKind::Syntax,
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if self.peek() == &tok {
            Ok(self.next().pos)
        } else {
            let want = if tok == Tok::Eof {
                "end of input".to_string()
            } else {
                format!("`{}`", tok.symbol())
            };
            self.error(&want)
        }
    }

    fn keyword(&mut self, word: &str) -> Result<Pos, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == word => Ok(self.next().pos),
            _ => self.error(&format!("`{word}`")),
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.next().pos)),
            _ => self.error("an identifier"),
        }
    }

    /// `["-"] INT` as an `i64`.
    fn small_int(&mut self) -> Result<i64, ParseError> {
        let pos = self.pos();
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                let n = if neg { -n } else { n };
                n.to_i64().ok_or_else(|| {
                    ParseError::new(ErrorKind::Syntax, pos, format!("integer {n} is out of range"))
                })
            }
            _ => self.error("an integer"),
        }
    }

    fn identity(&mut self) -> Result<Identity, ParseError> {
        let pos = self.keyword("identity")?;
        let id = match self.peek().clone() {
            Tok::Str(s) => {
                self.next();
                s
            }
            _ => return self.error("an identity name in double quotes"),
        };
        self.expect(Tok::LBrace)?;
        self.keyword("lhs")?;
        self.expect(Tok::Eq)?;
        let lhs = self.expr()?;
        self.expect(Tok::Semi)?;
        self.keyword("rhs")?;
        self.expect(Tok::Eq)?;
        let rhs = self.expr()?;
        self.expect(Tok::Semi)?;
        let param = if self.is_keyword("param") {
            self.next();
            let (name, _) = self.ident()?;
            self.keyword("in")?;
            let lo = self.small_int()?;
            self.expect(Tok::DotDot)?;
            let hi = self.small_int()?;
            self.expect(Tok::Semi)?;
            Some(Param { name, lo, hi })
        } else {
            None
        };
        self.keyword("expect")?;
        self.expect(Tok::Eq)?;
        let expect = if self.is_keyword("true") {
            self.next();
            if self.eat(&Tok::Ge) {
                let dpos = self.pos();
                let d = self.small_int()?;
                let d = u32::try_from(d).ok().filter(|&d| d >= 1).ok_or_else(|| {
                    ParseError::new(ErrorKind::Syntax, dpos, "digit count must be positive")
                })?;
                self.keyword("digits")?;
                Expect::Confirmed(d)
            } else {
                Expect::Confirmed(DEFAULT_MIN_DIGITS)
            }
        } else if self.is_keyword("false") {
            self.next();
            Expect::Refuted
        } else {
            return self.error("`true` or `false`");
        };
        self.expect(Tok::Semi)?;
        self.expect(Tok::RBrace)?;
        Ok(Identity {
            id,
            lhs,
            rhs,
            param,
            expect,
            pos,
        })
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.mult()?;
        loop {
            let pos = self.pos();
            let op = match self.peek() {
                Tok::Plus => ExprKind::Add as fn(_, _) -> _,
                Tok::Minus => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.mult()?;
            lhs = Expr::at(op(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn mult(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let op = match self.peek() {
                Tok::Star => ExprKind::Mul as fn(_, _) -> _,
                Tok::Slash => ExprKind::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::at(op(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        if !self.eat(&Tok::Minus) {
            return self.postfix();
        }
        let inner = self.postfix()?;
        // a negated integer is a literal, so `(-1)^k` has base -1
        Ok(match inner.kind {
            ExprKind::Int(n) => Expr::at(ExprKind::Int(-n), pos),
            _ => Expr::at(ExprKind::Neg(Box::new(inner)), pos),
        })
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            let pos = self.pos();
            if self.eat(&Tok::Caret) {
                let exp = self.unary()?;
                e = Expr::at(ExprKind::Pow(Box::new(e), Box::new(exp)), pos);
            } else if self.eat(&Tok::Bang) {
                e = Expr::at(ExprKind::Factorial(Box::new(e)), pos);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(Expr::at(ExprKind::Int(n), pos))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.next();
                if name == "sum" || name == "prod" {
                    return self.bigop(&name, pos);
                }
                if self.peek() == &Tok::LParen {
                    return self.call(&name, pos);
                }
                if name == "pi" {
                    return Ok(Expr::at(ExprKind::Pi, pos));
                }
                if BUILTINS.contains(&name.as_str()) {
                    return Err(ParseError::new(
                        ErrorKind::Syntax,
                        pos,
                        format!("builtin `{name}` needs an argument list"),
                    ));
                }
                Ok(Expr::at(ExprKind::Var(name), pos))
            }
            _ => self.error("an expression"),
        }
    }

    fn call(&mut self, name: &str, pos: Pos) -> Result<Expr, ParseError> {
        let ctor: fn(Box<Expr>) -> ExprKind = match name {
            "sqrt" => ExprKind::Sqrt,
            "cosh" => ExprKind::Cosh,
            "abs" => ExprKind::Abs,
            "euler" => ExprKind::Euler,
            "bernoulli_hist" => ExprKind::BernoulliHist,
            "chi4" => ExprKind::Chi4,
            _ => {
                return Err(ParseError::new(
                    ErrorKind::Syntax,
                    pos,
                    format!("unknown function `{name}`"),
                ))
            }
        };
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        if args.len() != 1 {
            return Err(ParseError::new(
                ErrorKind::Syntax,
                pos,
                format!("`{name}` takes one argument, got {}", args.len()),
            ));
        }
        let arg = args.pop().expect("one argument");
        Ok(Expr::at(ctor(Box::new(arg)), pos))
    }

    fn bigop(&mut self, name: &str, pos: Pos) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let (var, _) = self.ident()?;
        self.expect(Tok::Comma)?;
        let domain = if self.is_keyword("odd_primes") {
            self.next();
            Domain::OddPrimes
        } else {
            let lo = self.small_int()?;
            self.expect(Tok::DotDot)?;
            if self.is_keyword("inf") {
                self.next();
                Domain::From(lo)
            } else {
                Domain::Range(lo, self.small_int()?)
            }
        };
        self.expect(Tok::Comma)?;
        let body = Box::new(self.expr()?);
        self.expect(Tok::RParen)?;
        let op = BigOp { var, domain, body };
        Ok(Expr::at(
            if name == "sum" {
                ExprKind::Sum(op)
            } else {
                ExprKind::Prod(op)
            },
            pos,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Expr {
        let mut parser = Parser::new(src).unwrap();
        let e = parser.expr().unwrap();
        assert_eq!(parser.peek(), &Tok::Eof);
        e
    }

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn precedence_and_associativity() {
        use ExprKind::*;
        let k = || Expr::var("k");
        // 1 - (-1)^k / (2*k+1)^3
        let want = Expr::new(Sub(
            b(Expr::int(1)),
            b(Expr::new(Div(
                b(Expr::new(Pow(b(Expr::int(-1)), b(k())))),
                b(Expr::new(Pow(
                    b(Expr::new(Add(
                        b(Expr::new(Mul(b(Expr::int(2)), b(k())))),
                        b(Expr::int(1)),
                    ))),
                    b(Expr::int(3)),
                ))),
            ))),
        ));
        assert_eq!(p("1 - (-1)^k / (2*k+1)^3"), want);
        // right associative powers, unary minus below powers
        assert_eq!(p("2^3^2"), p("2^(3^2)"));
        assert_eq!(
            p("-k^2"),
            Expr::new(Neg(b(Expr::new(Pow(b(k()), b(Expr::int(2)))))))
        );
        assert_eq!(p("a - b - c"), p("(a - b) - c"));
        assert_eq!(p("a / b * c"), p("(a / b) * c"));
        assert_eq!(p("2*n!"), p("2*(n!)"));
    }

    #[test]
    fn identity_with_defaults() {
        let c = parse(
            "identity \"eq10\" { lhs = prod(k, 1..inf, 1 - (-1)^k / (2*k+1)); \
             rhs = pi * sqrt(2) / 4; expect = true; }",
        )
        .unwrap();
        let id = &c.identities[0];
        assert_eq!(id.id, "eq10");
        assert_eq!(id.expect, Expect::Confirmed(DEFAULT_MIN_DIGITS));
        let ExprKind::Prod(op) = &id.lhs.kind else {
            panic!("expected a product")
        };
        assert_eq!(op.domain, Domain::From(1));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse("identity \"x\" {\n  lhs = 1 +;\n").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        assert_eq!(e.pos, Pos { line: 2, col: 12 });
        assert!(e.message.contains("`;`"), "{}", e.message);

        let e = parse("identity \"x\" { lhs = foo(1); rhs = 1; expect = false; }").unwrap_err();
        assert!(e.message.contains("unknown function"));
        let e = parse("identity \"x\" { lhs = sqrt(1, 2); rhs = 1; expect = false; }").unwrap_err();
        assert!(e.message.contains("one argument"));
        assert!(parse("identity \"x\" { lhs = 1; rhs = 1; expect = maybe; }").is_err());
    }

    #[test]
    fn empty_corpus() {
        assert!(parse("  # nothing here\n").unwrap().identities.is_empty());
    }
}
