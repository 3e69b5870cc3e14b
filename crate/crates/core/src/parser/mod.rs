//! Shunting-yard parser for rational-function expressions and a stack
//! evaluator over prime fields.

mod eval;
mod lexer;
mod shunting;

pub use eval::{deduplicate, evaluate, evaluate_pre, precompute_tokens, PreEvaluatedProgram, PreToken};
pub use shunting::{identifiers, parse, parse_file, validate_variable};

use std::fmt::Write as _;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::numtheory::BigRational;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Num(BigRational),
    Var(usize),
    Add,
    Sub,
    Mul,
    Div,
    /// Raises the top of the stack to a fixed integer power.
    Pow(i64),
    Neg,
}

/// A parsed expression in postfix order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostfixProgram {
    pub tokens: Vec<Token>,
    pub n_vars: usize,
    /// FNV-1a digest of the whitespace-free source.
    pub source_hash: u64,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .filter(|b| !b.is_ascii_whitespace())
        .fold(0xcbf29ce484222325, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn rational_text(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl PostfixProgram {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Space separated postfix notation.
    pub fn to_postfix_string(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match t {
                Token::Num(q) => {
                    let _ = write!(out, "{}", rational_text(q));
                }
                Token::Var(v) => out.push_str(&names[*v]),
                Token::Add => out.push('+'),
                Token::Sub => out.push('-'),
                Token::Mul => out.push('*'),
                Token::Div => out.push('/'),
                Token::Pow(e) => {
                    let _ = write!(out, "{e} ^");
                }
                Token::Neg => out.push_str("neg"),
            }
        }
        out
    }

    /// Fully parenthesized infix text that parses back to this program's
    /// value.
    pub fn to_infix(&self, names: &[String]) -> String {
        let mut st: Vec<String> = vec![];
        for t in &self.tokens {
            let s = match t {
                Token::Num(q) if q.is_negative() || !q.denom().is_one() => format!("({})", rational_text(q)),
                Token::Num(q) => rational_text(q),
                Token::Var(v) => names[*v].clone(),
                Token::Neg => format!("(-{})", st.pop().unwrap()),
                Token::Pow(e) if *e < 0 => format!("({}^({e}))", st.pop().unwrap()),
                Token::Pow(e) => format!("({}^{e})", st.pop().unwrap()),
                op => {
                    let b = st.pop().unwrap();
                    let a = st.pop().unwrap();
                    let c = match op {
                        Token::Add => '+',
                        Token::Sub => '-',
                        Token::Mul => '*',
                        _ => '/',
                    };
                    format!("({a}{c}{b})")
                }
            };
            st.push(s);
        }
        st.pop().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_whitespace() {
        assert_eq!(fnv1a("z1 + Z2"), fnv1a("z1+Z2"));
        assert_ne!(fnv1a("z1+Z2"), fnv1a("Z2+z1"));
    }
}
