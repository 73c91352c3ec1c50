//! Strictly increasing index sequences `(lambda_n)_{n >= 1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(f64),
    N,
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Ceil,
    Floor,
    Round,
    Log2,
    Ln,
    Sqrt,
}

impl Expr {
    fn eval(&self, n: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::N => n,
            Expr::Neg(e) => -e.eval(n),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(n), b.eval(n));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    '^' => a.powf(b),
                    _ => unreachable!(),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(n);
                match f {
                    Func::Ceil => v.ceil(),
                    Func::Floor => v.floor(),
                    Func::Round => v.round(),
                    Func::Log2 => v.log2(),
                    Func::Ln => v.ln(),
                    Func::Sqrt => v.sqrt(),
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
    fn parse(src: &'a str) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    fn error(&self, what: &str) -> Error {
        Error::Expression(format!(
            "{what} at offset {} in {:?}",
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

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(c as char, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(c as char, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                s.parse()
                    .map(Expr::Num)
                    .map_err(|_| self.error("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "n" {
                    return Ok(Expr::N);
                }
                let f = match name {
                    "ceil" => Func::Ceil,
                    "floor" => Func::Floor,
                    "round" => Func::Round,
                    "log2" => Func::Log2,
                    "ln" => Func::Ln,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(self.error(&format!("unknown name '{name}'"))),
                };
                if self.peek() != Some(b'(') {
                    return Err(self.error("expected '('"));
                }
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(Expr::Call(f, Box::new(e)))
            }
            _ => Err(self.error("unexpected input")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSpec {
    /// `table[n - 1] = lambda_n`.
    Table(Vec<u64>),
    /// Closed form in `n`, e.g. `n^2`, `2*n`, `n*ceil(log2(n+1))`.
    Expr(String),
}

/// A strictly increasing sequence of positive integers indexed from 1.
#[derive(Clone, PartialEq)]
pub struct LambdaSequence {
    spec: LambdaSpec,
    expr: Option<Expr>,
}

impl fmt::Debug for LambdaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("LambdaSequence").field(&self.spec).finish()
    }
}

impl fmt::Display for LambdaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec {
            LambdaSpec::Expr(s) => write!(f, "{s}"),
            LambdaSpec::Table(t) => write!(f, "table[{}]", t.len()),
        }
    }
}

impl LambdaSequence {
    pub fn parse(expr: &str) -> Result<Self> {
        let e = Parser::parse(expr)?;
        Ok(LambdaSequence {
            spec: LambdaSpec::Expr(expr.trim().to_string()),
            expr: Some(e),
        })
    }

    pub fn table(values: Vec<u64>) -> Result<Self> {
        let seq = LambdaSequence {
            spec: LambdaSpec::Table(values),
            expr: None,
        };
        if let LambdaSpec::Table(t) = &seq.spec {
            seq.prefix(t.len() as u64)?;
        }
        Ok(seq)
    }

    pub fn from_spec(spec: LambdaSpec) -> Result<Self> {
        match spec {
            LambdaSpec::Expr(s) => Self::parse(&s),
            LambdaSpec::Table(t) => Self::table(t),
        }
    }

    pub fn spec(&self) -> &LambdaSpec {
        &self.spec
    }

    /// `n -> n^p`.
    pub fn power(p: u32) -> Self {
        Self::parse(&format!("n^{p}")).expect("static expression")
    }

    /// `n -> d n`.
    pub fn linear(d: u64) -> Self {
        Self::parse(&format!("{d}*n")).expect("static expression")
    }

    fn raw(&self, n: u64) -> Result<u64> {
        match (&self.spec, &self.expr) {
            (LambdaSpec::Table(t), _) => t
                .get((n as usize).wrapping_sub(1))
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("lambda table has no entry for n = {n}"))),
            (_, Some(e)) => {
                let v = e.eval(n as f64);
                let r = v.round();
                if !v.is_finite() || (v - r).abs() > 1e-9 * r.abs().max(1.0) || !(1.0..=9.0e15).contains(&r) {
                    return Err(Error::Expression(format!(
                        "value {v} at n = {n} is not a positive integer"
                    )));
                }
                Ok(r as u64)
            }
            _ => unreachable!(),
        }
    }

    /// `lambda_n`, checked against `lambda_{n-1}`.
    pub fn get(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidArgument("lambda is indexed from n = 1".into()));
        }
        let v = self.raw(n)?;
        if v < 1 || (n > 1 && v <= self.raw(n - 1)?) {
            return Err(Error::NotIncreasing(n));
        }
        Ok(v)
    }

    /// `lambda_1 ..= lambda_n`, validated.
    pub fn prefix(&self, n: u64) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(n as usize);
        for k in 1..=n {
            let v = self.raw(k)?;
            if v < 1 || out.last().is_some_and(|&prev| v <= prev) {
                return Err(Error::NotIncreasing(k));
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// `lambda_n / n` for `n = 1..=N` with its running maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioProfile {
    pub ratios: Vec<f64>,
    pub running_max: Vec<f64>,
}

pub fn ratio_profile(lambda: &LambdaSequence, horizon: u64) -> Result<RatioProfile> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("ratio profile needs N >= 1".into()));
    }
    let ratios: Vec<f64> = lambda
        .prefix(horizon)?
        .iter()
        .enumerate()
        .map(|(i, &v)| v as f64 / (i + 1) as f64)
        .collect();
    let running_max = ratios
        .iter()
        .scan(f64::NEG_INFINITY, |m, &r| {
            *m = m.max(r);
            Some(*m)
        })
        .collect();
    Ok(RatioProfile {
        ratios,
        running_max,
    })
}
