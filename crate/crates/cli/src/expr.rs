//! Expression syntax for trigonometric coefficient functions.
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := rational | "sin" "(" lin ")" | "cos" "(" lin ")" | "(" expr ")" | "-" factor
//! lin      := ["-"] lterm (("+" | "-") lterm)*
//! lterm    := [int "*"] "x" index
//! rational := int ("/" posint)?
//! ```

use nijenhuis_core::coeffring::{Rational, TrigPoly};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-integer frequency at position {pos}")]
    NonIntegerFrequency { pos: usize },
    #[error("unknown coordinate x{index} at position {pos} (dimension {dim})")]
    UnknownCoordinate { pos: usize, index: usize, dim: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Rational(Rational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// `sin(m·x)`, with integer frequency vector `m`.
    Sin(Vec<i64>),
    Cos(Vec<i64>),
}

impl Expr {
    pub fn to_trig(&self, dim: usize) -> TrigPoly {
        match self {
            Expr::Rational(r) => TrigPoly::from_rational(dim, r.clone()),
            Expr::Neg(a) => -&a.to_trig(dim),
            Expr::Add(a, b) => &a.to_trig(dim) + &b.to_trig(dim),
            Expr::Sub(a, b) => &a.to_trig(dim) - &b.to_trig(dim),
            Expr::Mul(a, b) => &a.to_trig(dim) * &b.to_trig(dim),
            Expr::Sin(m) => TrigPoly::sin_mode(m.clone()),
            Expr::Cos(m) => TrigPoly::cos_mode(m.clone()),
        }
    }

    /// Direct floating-point evaluation, independent of `TrigPoly`.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let dot = |m: &[i64]| m.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum::<f64>();
        match self {
            Expr::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Expr::Neg(a) => -a.eval_f64(x),
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Expr::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
            Expr::Sin(m) => dot(m).sin(),
            Expr::Cos(m) => dot(m).cos(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.syntax(format!("expected '{}'", c as char))
        }
    }

    fn int(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.syntax("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn at_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(kw.as_bytes())
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.int()?;
                let den = if self.eat(b'/') {
                    let d = self.int()?;
                    if d.is_zero() {
                        return self.syntax("zero denominator");
                    }
                    d
                } else {
                    BigInt::from(1)
                };
                if self.peek() == Some(b'.') {
                    return self.syntax("decimal literals are not supported; use a fraction");
                }
                Ok(Expr::Rational(Rational::new(num, den)))
            }
            Some(b'x') => self.syntax("bare coordinates are not periodic; use sin or cos"),
            Some(_) if self.at_keyword("sin") || self.at_keyword("cos") => {
                let is_sin = self.at_keyword("sin");
                self.pos += 3;
                self.expect(b'(')?;
                let m = self.lin()?;
                self.expect(b')')?;
                Ok(if is_sin { Expr::Sin(m) } else { Expr::Cos(m) })
            }
            Some(_) => self.syntax("unexpected character"),
            None => self.syntax("unexpected end of input"),
        }
    }

    fn lin(&mut self) -> Result<Vec<i64>, ExprError> {
        let mut m = vec![0i64; self.dim];
        let mut sign = if self.eat(b'-') { -1 } else { 1 };
        loop {
            let (idx, c) = self.lterm()?;
            m[idx] += sign * c;
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else {
                break;
            }
        }
        if m.iter().all(|&c| c == 0) {
            return self.syntax("frequency vector is zero");
        }
        Ok(m)
    }

    fn lterm(&mut self) -> Result<(usize, i64), ExprError> {
        let coef = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let v = self.int()?;
                if self.peek() == Some(b'/') || self.peek() == Some(b'.') {
                    return Err(ExprError::NonIntegerFrequency { pos: start });
                }
                self.expect(b'*')?;
                match v.to_i64() {
                    Some(v) => v,
                    None => return self.syntax("frequency too large"),
                }
            }
            _ => 1,
        };
        if !self.eat(b'x') {
            return self.syntax("expected coordinate x1..xn (phases are not supported)");
        }
        let pos = self.pos - 1;
        let index = self.int()?;
        let index = index.to_usize().unwrap_or(usize::MAX);
        if index == 0 || index > self.dim {
            return Err(ExprError::UnknownCoordinate { pos, index, dim: self.dim });
        }
        if matches!(self.peek(), Some(b'/') | Some(b'.')) {
            return Err(ExprError::NonIntegerFrequency { pos: self.pos });
        }
        Ok((index - 1, coef))
    }
}

/// Parses `text` to an AST over coordinates `x1..x{dim}`.
pub fn parse_ast(text: &str, dim: usize) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.syntax("trailing input");
    }
    Ok(e)
}

/// Parses `text` to an exact real trigonometric polynomial on `T^dim`.
pub fn parse_expr(text: &str, dim: usize) -> Result<TrigPoly, ExprError> {
    parse_ast(text, dim).map(|e| e.to_trig(dim))
}

/// Renders a real trigonometric polynomial in the syntax accepted above.
pub fn print_expr(p: &TrigPoly) -> Option<String> {
    p.to_real_string()
}

/// Floating-point value of an exact polynomial at `x` (real part).
pub fn eval_trig(p: &TrigPoly, x: &[f64]) -> f64 {
    p.eval(x).map(|(re, _)| re).unwrap_or(f64::NAN)
}
