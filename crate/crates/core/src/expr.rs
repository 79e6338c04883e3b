//! Tiny closed-form expression interpreter for coefficient functions.
//!
//! Grammar: decimal literals, the variable `x`, the constant `pi`, binary
//! `+ - * / ^` (with `^` right-associative and binding tightest), unary
//! minus, parentheses, and the functions `exp`, `log`, `sin`, `cos`,
//! `sqrt`, `abs`. Expressions are parsed once into a small stack program
//! and evaluated with plain f64 arithmetic; domain violations surface as
//! NaN at evaluation sites and are caught by the callers' finiteness checks.

use crate::error::{Error, Result};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Push(f64),
    X,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

/// A parsed coefficient expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    program: Vec<Op>,
    source: String,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut parser = Parser { tokens, pos: 0 };
        let mut program = Vec::new();
        parser.expr(&mut program)?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing token in '{src}'"
            )));
        }
        Ok(Expr { program, source: src.to_string() })
    }

    /// Build an expression that always evaluates to `v`.
    pub fn constant(v: f64) -> Expr {
        Expr { program: alloc::vec![Op::Push(v)], source: format!("{v}") }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut stack = [0.0f64; 32];
        let mut top = 0usize;
        for op in &self.program {
            match op {
                Op::Push(v) => {
                    stack[top] = *v;
                    top += 1;
                }
                Op::X => {
                    stack[top] = x;
                    top += 1;
                }
                Op::Neg => stack[top - 1] = -stack[top - 1],
                Op::Exp => stack[top - 1] = libm::exp(stack[top - 1]),
                Op::Log => stack[top - 1] = libm::log(stack[top - 1]),
                Op::Sin => stack[top - 1] = libm::sin(stack[top - 1]),
                Op::Cos => stack[top - 1] = libm::cos(stack[top - 1]),
                Op::Sqrt => stack[top - 1] = libm::sqrt(stack[top - 1]),
                Op::Abs => stack[top - 1] = libm::fabs(stack[top - 1]),
                Op::Add => {
                    top -= 1;
                    stack[top - 1] += stack[top];
                }
                Op::Sub => {
                    top -= 1;
                    stack[top - 1] -= stack[top];
                }
                Op::Mul => {
                    top -= 1;
                    stack[top - 1] *= stack[top];
                }
                Op::Div => {
                    top -= 1;
                    stack[top - 1] /= stack[top];
                }
                Op::Pow => {
                    top -= 1;
                    let b = stack[top];
                    let a = stack[top - 1];
                    stack[top - 1] = if b == libm::rint(b) && libm::fabs(b) <= 64.0 {
                        // exact integer powers, valid for negative bases too
                        let mut r = 1.0;
                        let n = libm::fabs(b) as u32;
                        for _ in 0..n {
                            r *= a;
                        }
                        if b < 0.0 {
                            1.0 / r
                        } else {
                            r
                        }
                    } else {
                        libm::pow(a, b)
                    };
                }
            }
        }
        stack[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        match ch {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, '0'..='9' | '.' )
                {
                    i += 1;
                }
                // exponent part like 1e-3
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number '{text}'")))?;
                out.push(Token::Num(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                out.push(Token::Ident(src[start..i].to_string()));
            }
            _ => return Err(Error::Parse(format!("unexpected character '{ch}'"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self, out: &mut Vec<Op>) -> Result<()> {
        self.term(out)?;
        while let Some(tok) = self.peek() {
            let op = match tok {
                Token::Plus => Op::Add,
                Token::Minus => Op::Sub,
                _ => break,
            };
            self.pos += 1;
            self.term(out)?;
            out.push(op);
        }
        Ok(())
    }

    fn term(&mut self, out: &mut Vec<Op>) -> Result<()> {
        self.unary(out)?;
        while let Some(tok) = self.peek() {
            let op = match tok {
                Token::Star => Op::Mul,
                Token::Slash => Op::Div,
                _ => break,
            };
            self.pos += 1;
            self.unary(out)?;
            out.push(op);
        }
        Ok(())
    }

    fn unary(&mut self, out: &mut Vec<Op>) -> Result<()> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            self.unary(out)?;
            out.push(Op::Neg);
            return Ok(());
        }
        self.power(out)
    }

    fn power(&mut self, out: &mut Vec<Op>) -> Result<()> {
        self.atom(out)?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            // right-associative exponent; allow a leading minus in it
            self.unary(out)?;
            out.push(Op::Pow);
        }
        Ok(())
    }

    fn atom(&mut self, out: &mut Vec<Op>) -> Result<()> {
        match self.next() {
            Some(Token::Num(v)) => out.push(Op::Push(v)),
            Some(Token::LParen) => {
                self.expr(out)?;
                match self.next() {
                    Some(Token::RParen) => {}
                    _ => return Err(Error::Parse("missing ')'".into())),
                }
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "x" => out.push(Op::X),
                "pi" => out.push(Op::Push(core::f64::consts::PI)),
                "exp" | "log" | "sin" | "cos" | "sqrt" | "abs" => {
                    match self.next() {
                        Some(Token::LParen) => {}
                        _ => {
                            return Err(Error::Parse(format!(
                                "function '{name}' needs parentheses"
                            )))
                        }
                    }
                    self.expr(out)?;
                    match self.next() {
                        Some(Token::RParen) => {}
                        _ => return Err(Error::Parse("missing ')'".into())),
                    }
                    out.push(match name.as_str() {
                        "exp" => Op::Exp,
                        "log" => Op::Log,
                        "sin" => Op::Sin,
                        "cos" => Op::Cos,
                        "sqrt" => Op::Sqrt,
                        _ => Op::Abs,
                    });
                }
                _ => return Err(Error::Parse(format!("unknown identifier '{name}'"))),
            },
            other => {
                return Err(Error::Parse(format!("unexpected token {other:?}")))
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let e = Expr::parse("1 + 2*x - x^2/4").unwrap();
        assert!((e.eval(2.0) - (1.0 + 4.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_unary() {
        let e = Expr::parse("-x^2").unwrap();
        assert_eq!(e.eval(3.0), -9.0);
        let e = Expr::parse("2^-2").unwrap();
        assert_eq!(e.eval(0.0), 0.25);
        let e = Expr::parse("2*3+4").unwrap();
        assert_eq!(e.eval(0.0), 10.0);
    }

    #[test]
    fn functions() {
        let e = Expr::parse("exp(0) + sin(pi/2) + sqrt(abs(-4)) + cos(0) + log(1)").unwrap();
        assert!((e.eval(0.0) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn negative_base_integer_power() {
        let e = Expr::parse("x^4").unwrap();
        assert_eq!(e.eval(-2.0), 16.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("2 +").is_err());
        assert!(Expr::parse("foo(x)").is_err());
        assert!(Expr::parse("1 2").is_err());
    }
}
