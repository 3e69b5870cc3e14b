use std::collections::HashMap;
use std::path::Path;

use num_bigint::BigInt;

use super::lexer::{error, lex, Item, Lex};
use super::{fnv1a, ParseError, PostfixProgram, Token};
use crate::numtheory::BigRational;

/// Checks a variable name: a letter followed by at most 15 letters or digits.
pub fn validate_variable(name: &str) -> Result<(), ParseError> {
    let b = name.as_bytes();
    let ok = !b.is_empty()
        && b.len() <= 16
        && b[0].is_ascii_alphabetic()
        && b.iter().all(|c| c.is_ascii_alphanumeric());
    if ok {
        Ok(())
    } else {
        Err(ParseError::InvalidVariable(name.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    LParen,
}

impl Op {
    fn prec(self) -> u8 {
        match self {
            Op::Add | Op::Sub => 1,
            Op::Mul | Op::Div => 2,
            Op::Neg => 3,
            Op::LParen => 0,
        }
    }

    fn token(self) -> Token {
        match self {
            Op::Add => Token::Add,
            Op::Sub => Token::Sub,
            Op::Mul => Token::Mul,
            Op::Div => Token::Div,
            Op::Neg => Token::Neg,
            Op::LParen => unreachable!(),
        }
    }
}

fn emit(out: &mut Vec<Token>, t: Token) {
    if t == Token::Neg {
        if let Some(Token::Num(q)) = out.last_mut() {
            *q = -q.clone();
            return;
        }
    }
    out.push(t);
}

struct Cursor<'a> {
    items: &'a [Item],
    pos: usize,
    end: (usize, usize),
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Lex> {
        self.items.get(self.pos).map(|i| &i.lex)
    }

    fn here(&self) -> (usize, usize) {
        self.items.get(self.pos).map_or(self.end, |i| (i.line, i.col))
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(error(l, c, msg))
    }

    /// Collapses a run of signs: `+`, `-`, `+-` and `-+` are accepted.
    fn signs(&mut self) -> Result<bool, ParseError> {
        let mut neg = false;
        let mut seen: Vec<&Lex> = vec![];
        while let Some(l @ (Lex::Plus | Lex::Minus)) = self.peek() {
            if seen.len() == 2 || seen.last() == Some(&l) {
                return self.fail("unsupported operator sequence");
            }
            neg ^= *l == Lex::Minus;
            seen.push(l);
            self.pos += 1;
        }
        Ok(neg)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(Lex::Number(s)) => {
                let v = s.parse::<i64>().or_else(|_| self.fail("exponent does not fit a machine integer"))?;
                self.pos += 1;
                Ok(v)
            }
            _ => self.fail("expected an integer exponent"),
        }
    }

    /// Exponent after `^`: an integer, or a signed integer in parentheses;
    /// chains associate to the right.
    fn exponent(&mut self) -> Result<i64, ParseError> {
        let e = match self.peek() {
            Some(Lex::Number(_)) => self.integer()?,
            Some(Lex::LParen) => {
                self.pos += 1;
                let neg = self.signs()?;
                let v = self.integer()?;
                if self.peek() != Some(&Lex::RParen) {
                    return self.fail("expected ')' after exponent");
                }
                self.pos += 1;
                if neg {
                    -v
                } else {
                    v
                }
            }
            Some(Lex::Minus) => return self.fail("negative exponents must be set in parentheses"),
            _ => return self.fail("expected an integer exponent"),
        };
        if self.peek() == Some(&Lex::Caret) {
            self.pos += 1;
            let rhs = self.exponent()?;
            let p = u32::try_from(rhs).or_else(|_| self.fail("unsupported exponent"))?;
            return e.checked_pow(p).map_or_else(|| self.fail("exponent overflow"), Ok);
        }
        Ok(e)
    }
}

fn one_expression(cur: &mut Cursor, vars: &HashMap<&str, usize>) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut ops: Vec<(Op, (usize, usize))> = Vec::new();
    let mut want_operand = true;
    loop {
        let at = cur.here();
        let Some(lex) = cur.peek().cloned() else { break };
        if lex == Lex::Semi {
            break;
        }
        match lex {
            Lex::Number(_) | Lex::Ident(_) | Lex::LParen if !want_operand => {
                return cur.fail("implicit multiplication is not supported");
            }
            Lex::Number(s) => {
                cur.pos += 1;
                let n: BigInt = s.parse().unwrap();
                out.push(Token::Num(BigRational::from_integer(n)));
                want_operand = false;
            }
            Lex::Ident(name) => {
                cur.pos += 1;
                let Some(&v) = vars.get(name.as_str()) else {
                    return Err(error(at.0, at.1, format!("unknown symbol {name:?}")));
                };
                out.push(Token::Var(v));
                want_operand = false;
            }
            Lex::LParen => {
                cur.pos += 1;
                ops.push((Op::LParen, at));
            }
            Lex::RParen => {
                if want_operand {
                    return cur.fail("expected an operand before ')'");
                }
                cur.pos += 1;
                loop {
                    match ops.pop() {
                        Some((Op::LParen, _)) => break,
                        Some((op, _)) => emit(&mut out, op.token()),
                        None => return Err(error(at.0, at.1, "unbalanced ')'")),
                    }
                }
            }
            Lex::Plus | Lex::Minus if want_operand => {
                if cur.signs()? {
                    ops.push((Op::Neg, at));
                }
            }
            Lex::Plus | Lex::Minus | Lex::Star | Lex::Slash => {
                if want_operand {
                    return cur.fail("unsupported operator sequence");
                }
                let op = match lex {
                    Lex::Star => {
                        cur.pos += 1;
                        Op::Mul
                    }
                    Lex::Slash => {
                        cur.pos += 1;
                        Op::Div
                    }
                    _ => {
                        if cur.signs()? {
                            Op::Sub
                        } else {
                            Op::Add
                        }
                    }
                };
                while let Some(&(top, _)) = ops.last() {
                    if top != Op::LParen && top.prec() >= op.prec() {
                        ops.pop();
                        emit(&mut out, top.token());
                    } else {
                        break;
                    }
                }
                ops.push((op, at));
                want_operand = true;
            }
            Lex::Caret => {
                if want_operand {
                    return cur.fail("'^' without a base");
                }
                cur.pos += 1;
                let e = cur.exponent()?;
                out.push(Token::Pow(e));
            }
            Lex::Semi => unreachable!(),
        }
    }
    if want_operand {
        return if out.is_empty() && ops.is_empty() {
            cur.fail("empty expression")
        } else {
            cur.fail("expression ends with an operator")
        };
    }
    while let Some((op, at)) = ops.pop() {
        if op == Op::LParen {
            return Err(error(at.0, at.1, "unbalanced '('"));
        }
        emit(&mut out, op.token());
    }
    Ok(out)
}

/// Parses `;`-separated expressions. A final expression without `;` is
/// accepted.
pub fn parse(source: &str, variables: &[String]) -> Result<Vec<PostfixProgram>, ParseError> {
    let mut vars = HashMap::new();
    for (i, v) in variables.iter().enumerate() {
        validate_variable(v)?;
        vars.insert(v.as_str(), i);
    }
    let items = lex(source)?;
    let end = items.last().map_or((1, 1), |i| (i.line, i.col + 1));
    let mut cur = Cursor {
        items: &items,
        pos: 0,
        end,
    };
    let mut out = Vec::new();
    while cur.pos < items.len() {
        let start = cur.pos;
        let tokens = one_expression(&mut cur, &vars)?;
        let text: String = items[start..cur.pos].iter().map(|i| lex_text(&i.lex)).collect();
        out.push(PostfixProgram {
            tokens,
            n_vars: variables.len(),
            source_hash: fnv1a(&text),
        });
        if cur.peek() == Some(&Lex::Semi) {
            cur.pos += 1;
        }
    }
    Ok(out)
}

/// Distinct identifiers of `source`, ordered with numeric suffixes compared
/// as numbers (`z2` before `z10`).
pub fn identifiers(source: &str) -> Result<Vec<String>, ParseError> {
    let mut names: Vec<String> = lex(source)?
        .into_iter()
        .filter_map(|i| match i.lex {
            Lex::Ident(s) => Some(s),
            _ => None,
        })
        .collect();
    let key = |s: &String| {
        let stem = s.trim_end_matches(|c: char| c.is_ascii_digit());
        let num = s[stem.len()..].parse::<u64>().ok();
        (stem.to_string(), num, s.clone())
    };
    names.sort_by_key(key);
    names.dedup();
    Ok(names)
}

fn lex_text(l: &Lex) -> &str {
    match l {
        Lex::Number(s) | Lex::Ident(s) => s,
        Lex::Plus => "+",
        Lex::Minus => "-",
        Lex::Star => "*",
        Lex::Slash => "/",
        Lex::Caret => "^",
        Lex::LParen => "(",
        Lex::RParen => ")",
        Lex::Semi => ";",
    }
}

pub fn parse_file(path: &Path, variables: &[String]) -> Result<Vec<PostfixProgram>, ParseError> {
    let src = std::fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse(&src, variables)
}
