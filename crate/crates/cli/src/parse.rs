//! Recursive-descent parser for the model expression language.
//!
//! Grammar (whitespace-insensitive, lowercase identifiers):
//!
//! ```text
//! expr := ball(INT) | surface(INT) | tstar_sphere(INT) | tstar_torus(INT)
//!       | csum(expr, expr) | prod(expr, expr)
//!       | handle(expr, INT [, INT]) | tower(expr, INT) | axiom(IDENT)
//! ```
//!
//! Errors carry the line and column of the offending token.

use std::fmt;

use liouville_core::SpaceExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(input: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            bump(c, &mut line, &mut col);
            continue;
        }
        match c {
            '(' => {
                chars.next();
                bump(c, &mut line, &mut col);
                out.push(Spanned {
                    tok: Tok::LParen,
                    line: tline,
                    col: tcol,
                });
            }
            ')' => {
                chars.next();
                bump(c, &mut line, &mut col);
                out.push(Spanned {
                    tok: Tok::RParen,
                    line: tline,
                    col: tcol,
                });
            }
            ',' => {
                chars.next();
                bump(c, &mut line, &mut col);
                out.push(Spanned {
                    tok: Tok::Comma,
                    line: tline,
                    col: tcol,
                });
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                s.push(c);
                chars.next();
                bump(c, &mut line, &mut col);
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let value: i64 = s.parse().map_err(|_| ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("bad integer `{s}`"),
                })?;
                out.push(Spanned {
                    tok: Tok::Int(value),
                    line: tline,
                    col: tcol,
                });
            }
            'a'..='z' | '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_lowercase() || d == '_' || d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Ident(s),
                    line: tline,
                    col: tcol,
                });
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: String) -> ParseError {
        match self.peek().or_else(|| self.toks.last()) {
            Some(t) => ParseError {
                line: t.line,
                col: t.col,
                message,
            },
            None => ParseError {
                line: 1,
                col: 1,
                message,
            },
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Spanned, ParseError> {
        match self.next() {
            Some(t) if t.tok == want => Ok(t),
            Some(t) => Err(ParseError {
                line: t.line,
                col: t.col,
                message: format!("expected {what}, found {}", describe(&t.tok)),
            }),
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<(i64, Spanned), ParseError> {
        match self.next() {
            Some(t) => match t.tok {
                Tok::Int(v) => Ok((v, t)),
                ref other => Err(ParseError {
                    line: t.line,
                    col: t.col,
                    message: format!("expected {what}, found {}", describe(other)),
                }),
            },
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_positive(&mut self, what: &str) -> Result<u32, ParseError> {
        let (v, t) = self.expect_int(what)?;
        if v < 1 {
            return Err(ParseError {
                line: t.line,
                col: t.col,
                message: format!("{what} must be >= 1, got {v}"),
            });
        }
        u32::try_from(v).map_err(|_| ParseError {
            line: t.line,
            col: t.col,
            message: format!("{what} out of range"),
        })
    }

    fn parse_expr(&mut self) -> Result<SpaceExpr, ParseError> {
        let head = match self.next() {
            Some(t) => t,
            None => return Err(self.err_here("expected an expression".into())),
        };
        let name = match &head.tok {
            Tok::Ident(s) => s.clone(),
            other => {
                return Err(ParseError {
                    line: head.line,
                    col: head.col,
                    message: format!("expected a constructor name, found {}", describe(other)),
                })
            }
        };
        match name.as_str() {
            "ball" => {
                self.expect(Tok::LParen, "`(`")?;
                let n = self.expect_positive("ball dimension")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::Ball(n))
            }
            "surface" => {
                self.expect(Tok::LParen, "`(`")?;
                let g = self.expect_positive("genus")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::Surface(g))
            }
            "tstar_sphere" => {
                self.expect(Tok::LParen, "`(`")?;
                let n = self.expect_positive("sphere dimension")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::TStarSphere(n))
            }
            "tstar_torus" => {
                self.expect(Tok::LParen, "`(`")?;
                let n = self.expect_positive("torus rank")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::TStarTorus(n))
            }
            "csum" => {
                self.expect(Tok::LParen, "`(`")?;
                let a = self.parse_expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::csum(a, b))
            }
            "prod" => {
                self.expect(Tok::LParen, "`(`")?;
                let a = self.parse_expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::prod(a, b))
            }
            "handle" => {
                self.expect(Tok::LParen, "`(`")?;
                let base = self.parse_expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let (k, ktok) = self.expect_int("handle index")?;
                if k < 0 {
                    return Err(ParseError {
                        line: ktok.line,
                        col: ktok.col,
                        message: format!("handle index must be >= 0, got {k}"),
                    });
                }
                let shift = if matches!(self.peek().map(|t| &t.tok), Some(Tok::Comma)) {
                    self.next();
                    self.expect_int("framing shift")?.0
                } else {
                    0
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::handle(base, k as u32, shift))
            }
            "tower" => {
                self.expect(Tok::LParen, "`(`")?;
                let base = self.parse_expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let depth = self.expect_positive("tower depth")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::tower(base, depth))
            }
            "axiom" => {
                self.expect(Tok::LParen, "`(`")?;
                let name = match self.next() {
                    Some(t) => match t.tok {
                        Tok::Ident(s) => s,
                        ref other => {
                            return Err(ParseError {
                                line: t.line,
                                col: t.col,
                                message: format!(
                                    "expected an axiom name, found {}",
                                    describe(other)
                                ),
                            })
                        }
                    },
                    None => return Err(self.err_here("expected an axiom name".into())),
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(SpaceExpr::Axiom(name))
            }
            other => Err(ParseError {
                line: head.line,
                col: head.col,
                message: format!("unknown constructor `{other}`"),
            }),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
    }
}

/// Parse a model expression; total over the grammar, an error otherwise.
pub fn parse_expr(input: &str) -> Result<SpaceExpr, ParseError> {
    let toks = lex(input)?;
    let mut parser = Parser { toks, pos: 0 };
    let expr = parser.parse_expr()?;
    if let Some(t) = parser.peek() {
        return Err(ParseError {
            line: t.line,
            col: t.col,
            message: format!("trailing input starting at {}", describe(&t.tok)),
        });
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouville_core::SpaceExpr as E;

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse_expr("csum(ball(3), surface(2))").unwrap(),
            E::csum(E::Ball(3), E::Surface(2))
        );
        let h = parse_expr("handle(tstar_sphere(4), 2, -1)").unwrap();
        assert_eq!(h, E::handle(E::TStarSphere(4), 2, -1));
        assert_eq!(
            parse_expr("tower(axiom(ramanujam), 5)").unwrap(),
            E::tower(E::Axiom("ramanujam".into()), 5)
        );
        // whitespace-insensitive
        assert_eq!(
            parse_expr(" csum(  ball( 3 ),\n surface(2) ) ").unwrap(),
            parse_expr("csum(ball(3),surface(2))").unwrap()
        );
        // optional framing shift
        assert_eq!(
            parse_expr("handle(ball(3), 1)").unwrap(),
            E::handle(E::Ball(3), 1, 0)
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expr("csum(ball(3) surface(2))").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(e.col, 14);
        let e = parse_expr("klein(2)").unwrap_err();
        assert!(e.message.contains("unknown constructor"));
        let e = parse_expr("ball(0)").unwrap_err();
        assert!(e.message.contains(">= 1"), "{}", e.message);
        let e = parse_expr("ball(3) ball").unwrap_err();
        assert!(e.message.contains("trailing"));
        let e = parse_expr("csum(ball(3)\n, surface(0))").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
