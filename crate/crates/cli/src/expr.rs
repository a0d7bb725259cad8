//! Tiny arithmetic expression evaluator for spec strings.
//!
//! Grammar (f64 semantics):
//!   expr   := term (('+' | '-') term)*
//!   term   := unary (('*' | '/') unary)*
//!   unary  := '-' unary | power
//!   power  := atom ('^' unary)?
//!   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//!
//! Identifiers resolve against a caller-supplied variable table; a fixed set
//! of functions (log, log2, exp, sqrt, abs, sin, cos, min, max, pow) and the
//! constants pi and e are built in. Errors carry byte offsets into the
//! source string.

use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprError {
    UnexpectedChar { at: usize, ch: char },
    UnexpectedEnd,
    UnknownIdent { at: usize, name: String },
    BadArity { at: usize, name: String, want: usize, got: usize },
    TrailingInput { at: usize },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::UnexpectedChar { at, ch } => {
                write!(f, "unexpected character '{ch}' at byte {at}")
            }
            ExprError::UnexpectedEnd => write!(f, "unexpected end of expression"),
            ExprError::UnknownIdent { at, name } => {
                write!(f, "unknown identifier '{name}' at byte {at}")
            }
            ExprError::BadArity { at, name, want, got } => {
                write!(f, "{name} at byte {at} takes {want} argument(s), got {got}")
            }
            ExprError::TrailingInput { at } => write!(f, "trailing input at byte {at}"),
        }
    }
}

impl std::error::Error for ExprError {}

/// Parsed expression, reusable across many variable bindings.
#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    Var(String),
    Call { name: String, at: usize, args: Vec<Expr> },
    Neg(Box<Expr>),
    Bin { op: char, lhs: Box<Expr>, rhs: Box<Expr> },
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(ExprError::TrailingInput { at: p.pos });
        }
        Ok(e)
    }

    pub fn eval(&self, vars: &HashMap<String, f64>) -> Result<f64, ExprError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(name) => match name.as_str() {
                "pi" => Ok(std::f64::consts::PI),
                "e" => Ok(std::f64::consts::E),
                _ => vars
                    .get(name)
                    .copied()
                    .ok_or_else(|| ExprError::UnknownIdent { at: 0, name: name.clone() }),
            },
            Expr::Neg(e) => Ok(-e.eval(vars)?),
            Expr::Bin { op, lhs, rhs } => {
                let (a, b) = (lhs.eval(vars)?, rhs.eval(vars)?);
                Ok(match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    '^' => a.powf(b),
                    _ => unreachable!("parser only emits known operators"),
                })
            }
            Expr::Call { name, at, args } => {
                let arity = |want: usize| -> Result<(), ExprError> {
                    if args.len() != want {
                        Err(ExprError::BadArity {
                            at: *at,
                            name: name.clone(),
                            want,
                            got: args.len(),
                        })
                    } else {
                        Ok(())
                    }
                };
                let one = |f: fn(f64) -> f64, args: &[Expr]| -> Result<f64, ExprError> {
                    Ok(f(args[0].eval(vars)?))
                };
                match name.as_str() {
                    "log" => arity(1).and_then(|_| one(f64::ln, args)),
                    "log2" => arity(1).and_then(|_| one(f64::log2, args)),
                    "exp" => arity(1).and_then(|_| one(f64::exp, args)),
                    "sqrt" => arity(1).and_then(|_| one(f64::sqrt, args)),
                    "abs" => arity(1).and_then(|_| one(f64::abs, args)),
                    "sin" => arity(1).and_then(|_| one(f64::sin, args)),
                    "cos" => arity(1).and_then(|_| one(f64::cos, args)),
                    "min" => {
                        arity(2)?;
                        Ok(args[0].eval(vars)?.min(args[1].eval(vars)?))
                    }
                    "max" => {
                        arity(2)?;
                        Ok(args[0].eval(vars)?.max(args[1].eval(vars)?))
                    }
                    "pow" => {
                        arity(2)?;
                        Ok(args[0].eval(vars)?.powf(args[1].eval(vars)?))
                    }
                    _ => Err(ExprError::UnknownIdent { at: *at, name: name.clone() }),
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin { op: c as char, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin { op: c as char, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some(b'-') = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin { op: '^', lhs: Box::new(base), rhs: Box::new(exp) });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(ExprError::UnexpectedEnd),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(e)
                    }
                    Some(ch) => Err(ExprError::UnexpectedChar { at: self.pos, ch: ch as char }),
                    None => Err(ExprError::UnexpectedEnd),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(ch) => Err(ExprError::UnexpectedChar { at: self.pos, ch: ch as char }),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E')
                && self.pos > start
                && self
                    .src
                    .get(self.pos + 1)
                    .is_some_and(|n| n.is_ascii_digit() || *n == b'+' || *n == b'-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| ExprError::UnexpectedChar { at: start, ch: text.chars().next().unwrap() })
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        if let Some(b'(') = self.peek() {
            self.pos += 1;
            let mut args = Vec::new();
            if self.peek() != Some(b')') {
                loop {
                    args.push(self.expr()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => break,
                        Some(ch) => {
                            return Err(ExprError::UnexpectedChar { at: self.pos, ch: ch as char })
                        }
                        None => return Err(ExprError::UnexpectedEnd),
                    }
                }
            }
            self.pos += 1; // closing paren
            return Ok(Expr::Call { name, at: start, args });
        }
        Ok(Expr::Var(name))
    }
}
