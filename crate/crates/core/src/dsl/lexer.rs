use num_bigint::BigInt;

use super::{ErrorKind, ParseError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Bang,
    DotDot,
    Ge,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub(crate) fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Eq => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::Bang => "!",
            Tok::DotDot => "..",
            Tok::Ge => ">=",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1u32;
    let mut col = 1u32;

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    digits.push(c);
                    bump(&mut chars);
                }
                let n: BigInt = digits.parse().expect("ascii digits");
                out.push(Token { tok: Tok::Int(n), pos });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !(c.is_ascii_alphanumeric() || c == '_') {
                        break;
                    }
                    name.push(c);
                    bump(&mut chars);
                }
                out.push(Token {
                    tok: Tok::Ident(name),
                    pos,
                });
            }
            '"' => {
                bump(&mut chars);
                let mut s = String::new();
                loop {
                    match bump(&mut chars) {
                        None | Some('\n') => {
                            return Err(ParseError::new(
                                ErrorKind::Lexical,
                                pos,
                                "unterminated string",
                            ))
                        }
                        Some('"') => break,
                        Some('\\') => match bump(&mut chars) {
                            Some(e @ ('"' | '\\')) => s.push(e),
                            _ => {
                                return Err(ParseError::new(
                                    ErrorKind::Lexical,
                                    pos,
                                    "bad escape in string (only \\\" and \\\\ are allowed)",
                                ))
                            }
                        },
                        Some(c) => s.push(c),
                    }
                }
                out.push(Token { tok: Tok::Str(s), pos });
            }
            _ => {
                bump(&mut chars);
                let two = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>, want: char| {
                    chars.peek() == Some(&want)
                };
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '!' => Tok::Bang,
                    '.' if two(&mut chars, '.') => {
                        bump(&mut chars);
                        Tok::DotDot
                    }
                    '>' if two(&mut chars, '=') => {
                        bump(&mut chars);
                        Tok::Ge
                    }
                    other => {
                        return Err(ParseError::new(
                            ErrorKind::Lexical,
                            pos,
                            format!("unexpected character {other:?}"),
                        ))
                    }
                };
                out.push(Token { tok, pos });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = lex("a ..3 >= # note\r\n  \"x\\\"y\"").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::DotDot,
                Tok::Int(3.into()),
                Tok::Ge,
                Tok::Str("x\"y".into()),
                Tok::Eof
            ]
        );
        assert_eq!(toks[2].pos, Pos { line: 1, col: 5 });
        assert_eq!(toks[4].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn bad_characters() {
        let e = lex("x = 1.5").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 6 });
        assert_eq!(e.kind, ErrorKind::Lexical);
        assert!(lex("\"open").is_err());
    }
}
