//! Recursive-descent parser for polynomial potential expressions.
//!
//! ```text
//! expression := term (('+' | '-') term)*
//! term       := factor (('*' | '/') factor)*
//! factor     := ('+' | '-') factor | base ('^' integer)?
//! base       := number | variable | '(' expression ')'
//! ```
//!
//! Numbers are integers or finite decimals and are read exactly; a fraction
//! such as `1/2` is simply a division of two constants. At most one variable
//! name may appear, and a divisor must be constant.

use std::fmt;

use thiserror::Error;

use super::Polynomial;
use crate::scalars::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {0}")]
    UnexpectedToken(String),
    #[error("malformed number {0:?}")]
    BadNumber(String),
    #[error("not a polynomial: {0}")]
    NonPolynomial(&'static str),
    #[error("more than one variable: {0:?} and {1:?}")]
    MultipleVariables(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source text.
    pub position: usize,
}

/// Syntax tree of a potential expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(ExactRational),
    Variable(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Direct evaluation of the tree at `q` (every variable takes the value
    /// `q`). `None` on division by zero.
    pub fn eval(&self, q: &ExactRational) -> Option<ExactRational> {
        Some(match self {
            Expr::Number(c) => c.clone(),
            Expr::Variable(_) => q.clone(),
            Expr::Neg(e) => -e.eval(q)?,
            Expr::Add(a, b) => a.eval(q)? + b.eval(q)?,
            Expr::Sub(a, b) => a.eval(q)? - b.eval(q)?,
            Expr::Mul(a, b) => a.eval(q)? * b.eval(q)?,
            Expr::Div(a, b) => a.eval(q)?.checked_div(&b.eval(q)?)?,
            Expr::Pow(b, n) => b.eval(q)?.pow(*n as i32),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(c) => write!(f, "({c})"),
            Expr::Variable(v) => f.write_str(v),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(b, n) => write!(f, "({b})^{n}"),
        }
    }
}

/// A parsed potential: the expanded polynomial plus the variable name used.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPotential {
    pub polynomial: Polynomial,
    pub variable: Option<String>,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            out.push((Tok::Num(text[start..i].to_string()), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else if c == '\u{2212}' {
            // typographic minus sign
            out.push((Tok::Op('-'), i));
            i += c.len_utf8();
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedChar(c),
                position: i,
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    variable: Option<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            position: self.here(),
        }
    }

    fn expression(&mut self) -> Result<(Expr, Polynomial), ParseError> {
        let (mut expr, mut poly) = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let (e, p) = self.term()?;
            if op == '+' {
                expr = Expr::Add(Box::new(expr), Box::new(e));
                poly = poly.add(&p);
            } else {
                expr = Expr::Sub(Box::new(expr), Box::new(e));
                poly = poly.sub(&p);
            }
        }
        Ok((expr, poly))
    }

    fn term(&mut self) -> Result<(Expr, Polynomial), ParseError> {
        let (mut expr, mut poly) = self.factor()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let at = self.here();
            let (e, p) = self.factor()?;
            if op == '*' {
                expr = Expr::Mul(Box::new(expr), Box::new(e));
                poly = poly.mul(&p);
            } else {
                let divisor = p.as_constant().ok_or(ParseError {
                    kind: ParseErrorKind::NonPolynomial("variable in divisor"),
                    position: at,
                })?;
                let inv = divisor.recip().ok_or(ParseError {
                    kind: ParseErrorKind::DivisionByZero,
                    position: at,
                })?;
                expr = Expr::Div(Box::new(expr), Box::new(e));
                poly = poly.scale(&inv);
            }
        }
        Ok((expr, poly))
    }

    fn factor(&mut self) -> Result<(Expr, Polynomial), ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                let (e, p) = self.factor()?;
                return Ok((Expr::Neg(Box::new(e)), p.neg()));
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                return self.factor();
            }
            _ => {}
        }
        let (base, poly) = self.base()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let at = self.here();
            let exp = match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    n.parse::<u32>().map_err(|_| ParseError {
                        kind: ParseErrorKind::NonPolynomial("exponent must be a nonnegative integer"),
                        position: at,
                    })?
                }
                Some(Tok::Op('-')) => {
                    return Err(ParseError {
                        kind: ParseErrorKind::NonPolynomial("negative power"),
                        position: at,
                    })
                }
                Some(Tok::Op('(')) => {
                    // allow a parenthesised integer such as ^(2)
                    self.pos += 1;
                    let n = match self.peek().cloned() {
                        Some(Tok::Num(n)) => n,
                        Some(Tok::Op('-')) => {
                            return Err(ParseError {
                                kind: ParseErrorKind::NonPolynomial("negative power"),
                                position: at,
                            })
                        }
                        _ => {
                            return Err(ParseError {
                                kind: ParseErrorKind::NonPolynomial(
                                    "exponent must be a nonnegative integer",
                                ),
                                position: at,
                            })
                        }
                    };
                    self.pos += 1;
                    self.expect(')')?;
                    n.parse::<u32>().map_err(|_| ParseError {
                        kind: ParseErrorKind::NonPolynomial("exponent must be a nonnegative integer"),
                        position: at,
                    })?
                }
                Some(t) => return Err(self.err(ParseErrorKind::UnexpectedToken(describe(&t)))),
                None => return Err(self.err(ParseErrorKind::UnexpectedEnd)),
            };
            return Ok((Expr::Pow(Box::new(base), exp), poly.pow(exp)));
        }
        Ok((base, poly))
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Op(o)) if *o == c => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(ParseErrorKind::UnexpectedToken(describe(t)))),
            None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn base(&mut self) -> Result<(Expr, Polynomial), ParseError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v = ExactRational::parse_decimal(&n).map_err(|_| ParseError {
                    kind: ParseErrorKind::BadNumber(n.clone()),
                    position: at,
                })?;
                Ok((Expr::Number(v.clone()), Polynomial::constant(v)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match &self.variable {
                    Some(v) if *v != name => {
                        return Err(ParseError {
                            kind: ParseErrorKind::MultipleVariables(v.clone(), name),
                            position: at,
                        })
                    }
                    Some(_) => {}
                    None => self.variable = Some(name.clone()),
                }
                Ok((Expr::Variable(name), Polynomial::identity()))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expression()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(t) => Err(self.err(ParseErrorKind::UnexpectedToken(describe(&t)))),
            None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n:?}"),
        Tok::Ident(n) => format!("name {n:?}"),
        Tok::Op(c) => format!("{c:?}"),
    }
}

/// Parses an expression and expands it into its dense coefficient vector.
pub fn parse_expression(text: &str) -> Result<ParsedPotential, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            position: 0,
        });
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
        variable: None,
    };
    let (expr, polynomial) = parser.expression()?;
    if let Some(t) = parser.peek() {
        return Err(parser.err(ParseErrorKind::UnexpectedToken(describe(t))));
    }
    Ok(ParsedPotential {
        polynomial,
        variable: parser.variable,
        expr,
    })
}

pub fn parse_potential(text: &str) -> Result<Polynomial, ParseError> {
    parse_expression(text).map(|p| p.polynomial)
}
