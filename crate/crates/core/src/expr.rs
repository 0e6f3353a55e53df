//! Parameter expressions over the radius `r`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! sum     := product ('+' product)*
//! product := power ('*' power)*
//! power   := atom ('^' power)?
//! atom    := number | 'r' | '(' sum ')' | 'ceil' '(' sum ')'
//! ```
//!
//! Numbers are unsigned decimal literals such as `2` or `2.5`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    R,
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Ceil(Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::R => r,
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Pow(a, b) => {
                let base = a.eval(r);
                let exp = b.eval(r);
                if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
                    base.powi(exp as i32)
                } else {
                    base.powf(exp)
                }
            }
            Expr::Ceil(a) => a.eval(r).ceil(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::pre(format!(
            "parameter expression: {msg} at offset {} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        while self.eat(b'+') {
            e = Expr::Add(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.power()?;
        while self.eat(b'*') {
            e = Expr::Mul(Box::new(e), Box::new(self.power()?));
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.power()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(b'r') => {
                self.pos += 1;
                Ok(Expr::R)
            }
            Some(b'c') if self.src[self.pos..].starts_with(b"ceil") => {
                self.pos += 4;
                if !self.eat(b'(') {
                    return Err(self.err("expected '(' after ceil"));
                }
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(Expr::Ceil(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                lit.parse::<f64>()
                    .map(Expr::Num)
                    .map_err(|_| self.err("malformed number"))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
