//! Closed-form scalar descriptors such as `H(s)`, `θ(t)` or `E(s, t)`.
//!
//! Descriptors are small expression trees over the variables `s` and `t`, built from
//! constants, arithmetic, powers, `log`, `exp`, `sqrt`, `abs`, `max` and `min`. They
//! parse from and print to a compact infix syntax so reports can name the function
//! they tested, e.g. `s + 1/s` or `s - log(s) + log(t)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    S,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, Error> {
        Parser::new(src).parse_all()
    }

    pub fn s() -> Expr {
        Expr::Var(Var::S)
    }

    pub fn t() -> Expr {
        Expr::Var(Var::T)
    }

    /// IEEE evaluation; out-of-domain primitives yield NaN or infinities.
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::S) => s,
            Expr::Var(Var::T) => t,
            Expr::Neg(a) => -a.eval(s, t),
            Expr::Add(a, b) => a.eval(s, t) + b.eval(s, t),
            Expr::Sub(a, b) => a.eval(s, t) - b.eval(s, t),
            Expr::Mul(a, b) => a.eval(s, t) * b.eval(s, t),
            Expr::Div(a, b) => a.eval(s, t) / b.eval(s, t),
            Expr::Pow(a, b) => a.eval(s, t).powf(b.eval(s, t)),
            Expr::Call(f, a) => {
                let x = a.eval(s, t);
                match f {
                    Func::Log => x.ln(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                }
            }
            Expr::Max(a, b) => a.eval(s, t).max(b.eval(s, t)),
            Expr::Min(a, b) => a.eval(s, t).min(b.eval(s, t)),
        }
    }

    /// Whether the expression uses a primitive with a kink (`abs`, `max`, `min`).
    pub fn has_kinks(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Call(Func::Abs, _) | Expr::Max(..) | Expr::Min(..) => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.has_kinks(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.has_kinks() || b.has_kinks()
            }
        }
    }

    pub fn uses_var(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses_var(v),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Max(a, b)
            | Expr::Min(a, b) => a.uses_var(v) || b.uses_var(v),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
            if e.precedence() < min_prec {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(Var::S) => f.write_str("s"),
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                child(f, a, 4)
            }
            Expr::Add(a, b) => {
                child(f, a, 1)?;
                f.write_str(" + ")?;
                child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                child(f, a, 1)?;
                f.write_str(" - ")?;
                child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                child(f, a, 2)?;
                f.write_str("*")?;
                child(f, b, 3)
            }
            Expr::Div(a, b) => {
                child(f, a, 2)?;
                f.write_str("/")?;
                child(f, b, 4)
            }
            Expr::Pow(a, b) => {
                child(f, a, 5)?;
                f.write_str("^")?;
                child(f, b, 4)
            }
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Log => "log",
                    Func::Exp => "exp",
                    Func::Sqrt => "sqrt",
                    Func::Abs => "abs",
                };
                write!(f, "{name}({a})")
            }
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

impl TryFrom<String> for Expr {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Expr::parse(&s)
    }
}

impl From<Expr> for String {
    fn from(e: Expr) -> String {
        e.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            tokens: Vec::new(),
            pos: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Descriptor {
            src: self.src.to_string(),
            msg: msg.into(),
        }
    }

    fn tokenize(&mut self) -> Result<(), Error> {
        let chars: Vec<char> = self.src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            if ch.is_whitespace() {
                i += 1;
            } else if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| self.err(format!("bad number {text:?}")))?;
                self.tokens.push(Token::Num(v));
            } else if ch.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                self.tokens.push(Token::Ident(chars[start..i].iter().collect()));
            } else if "+-*/^(),".contains(ch) {
                self.tokens.push(Token::Op(ch));
                i += 1;
            } else {
                return Err(self.err(format!("unexpected character {ch:?}")));
            }
        }
        Ok(())
    }

    fn parse_all(mut self) -> Result<Expr, Error> {
        self.tokenize()?;
        let e = self.expr()?;
        if self.pos != self.tokens.len() {
            return Err(self.err("trailing input"));
        }
        Ok(e)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<(), Error> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.err(format!("expected {op:?}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if self.eat_op('-') {
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "s" => Ok(Expr::Var(Var::S)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "log" | "ln" | "exp" | "sqrt" | "abs" => {
                        let func = match name.as_str() {
                            "log" | "ln" => Func::Log,
                            "exp" => Func::Exp,
                            "sqrt" => Func::Sqrt,
                            _ => Func::Abs,
                        };
                        self.expect_op('(')?;
                        let a = self.expr()?;
                        self.expect_op(')')?;
                        Ok(Expr::Call(func, Box::new(a)))
                    }
                    "max" | "min" => {
                        self.expect_op('(')?;
                        let a = self.expr()?;
                        self.expect_op(',')?;
                        let b = self.expr()?;
                        self.expect_op(')')?;
                        Ok(if name == "max" {
                            Expr::Max(Box::new(a), Box::new(b))
                        } else {
                            Expr::Min(Box::new(a), Box::new(b))
                        })
                    }
                    other => Err(self.err(format!("unknown identifier {other:?}"))),
                }
            }
            _ => Err(self.err("unexpected end of expression")),
        }
    }
}
