use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PostfixProgram, Token};
use crate::numtheory::{prime_sequence, FieldError, PrimeField};

/// Token of a program specialised to one field: numbers are replaced by
/// their images and constant subexpressions folded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreToken {
    Const(u64),
    Var(usize),
    Add,
    Sub,
    Mul,
    Div,
    Pow(i64),
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreEvaluatedProgram {
    pub tokens: Vec<PreToken>,
    pub field: PrimeField,
    pub n_vars: usize,
}

fn pow_i(f: PrimeField, a: u64, e: i64) -> Result<u64, FieldError> {
    if e < 0 {
        Ok(f.pow(f.inv(a)?, e.unsigned_abs()))
    } else {
        Ok(f.pow(a, e as u64))
    }
}

#[inline]
fn binary(f: PrimeField, t: PreToken, a: u64, b: u64) -> Result<u64, FieldError> {
    Ok(match t {
        PreToken::Add => f.add(a, b),
        PreToken::Sub => f.sub(a, b),
        PreToken::Mul => f.mul(a, b),
        PreToken::Div => f.div(a, b)?,
        _ => unreachable!(),
    })
}

fn op_of(t: &Token) -> PreToken {
    match t {
        Token::Add => PreToken::Add,
        Token::Sub => PreToken::Sub,
        Token::Mul => PreToken::Mul,
        Token::Div => PreToken::Div,
        Token::Pow(e) => PreToken::Pow(*e),
        Token::Neg => PreToken::Neg,
        Token::Var(v) => PreToken::Var(*v),
        Token::Num(_) => unreachable!(),
    }
}

/// Runs a token stream on a caller-owned stack; `leaf` maps number tokens.
fn run<'t, I, L>(f: PrimeField, tokens: I, values: &[u64], stack: &mut Vec<u64>, mut leaf: L) -> Result<u64, FieldError>
where
    I: Iterator<Item = (PreToken, Option<&'t Token>)>,
    L: FnMut(&Token) -> Result<u64, FieldError>,
{
    stack.clear();
    for (t, src) in tokens {
        match t {
            PreToken::Const(c) => stack.push(c),
            PreToken::Var(v) => stack.push(values[v]),
            PreToken::Neg => {
                let a = stack.last_mut().unwrap();
                *a = f.neg(*a);
            }
            PreToken::Pow(e) => {
                let a = stack.last_mut().unwrap();
                *a = pow_i(f, *a, e)?;
            }
            _ if src.is_some_and(|s| matches!(s, Token::Num(_))) => stack.push(leaf(src.unwrap())?),
            op => {
                let b = stack.pop().unwrap();
                let a = stack.last_mut().unwrap();
                *a = binary(f, op, *a, b)?;
            }
        }
    }
    Ok(stack.pop().unwrap())
}

impl PostfixProgram {
    /// Evaluates without pre-evaluation: every number is reduced anew.
    pub fn evaluate(&self, field: PrimeField, values: &[u64]) -> Result<u64, FieldError> {
        self.evaluate_with(field, values, &mut Vec::new())
    }

    pub fn evaluate_with(&self, field: PrimeField, values: &[u64], stack: &mut Vec<u64>) -> Result<u64, FieldError> {
        let tokens = self.tokens.iter().map(|t| match t {
            // placeholder op, dispatched to the leaf mapper
            Token::Num(_) => (PreToken::Add, Some(t)),
            other => (op_of(other), None),
        });
        run(field, tokens, values, stack, |t| match t {
            Token::Num(q) => field.from_rational(q),
            _ => unreachable!(),
        })
    }

    /// Evaluates a bunch of points with one pass over the tokens.
    pub fn evaluate_bunch(&self, field: PrimeField, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        let mut consts = Vec::new();
        let tokens: Vec<PreToken> = self
            .tokens
            .iter()
            .map(|t| match t {
                Token::Num(q) => match field.from_rational(q) {
                    Ok(v) => PreToken::Const(v),
                    Err(e) => {
                        consts.push(e);
                        PreToken::Const(0)
                    }
                },
                other => op_of(other),
            })
            .collect();
        if let Some(e) = consts.pop() {
            return points.iter().map(|_| Err(e.clone())).collect();
        }
        bunch(field, &tokens, points)
    }

    pub fn precompute(&self, field: PrimeField) -> Result<PreEvaluatedProgram, FieldError> {
        precompute_tokens(self, field)
    }
}

fn bunch(f: PrimeField, tokens: &[PreToken], points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
    let w = points.len();
    let mut err: Vec<Option<FieldError>> = vec![None; w];
    let mut stack: Vec<Vec<u64>> = Vec::new();
    let mut spare: Vec<Vec<u64>> = Vec::new();
    let take = |spare: &mut Vec<Vec<u64>>| spare.pop().unwrap_or_else(|| vec![0; w]);
    let invert = |lanes: &mut [u64], num: &[u64], err: &mut [Option<FieldError>]| {
        for l in 0..w {
            if lanes[l] == 0 {
                err[l].get_or_insert(FieldError::ZeroDivisor { dividend: num[l] });
                lanes[l] = 1;
            }
        }
        f.batch_inv(lanes).expect("zeros replaced");
    };
    for &t in tokens {
        match t {
            PreToken::Const(c) => {
                let mut v = take(&mut spare);
                v.fill(c);
                stack.push(v);
            }
            PreToken::Var(i) => {
                let mut v = take(&mut spare);
                for (l, p) in points.iter().enumerate() {
                    v[l] = p[i];
                }
                stack.push(v);
            }
            PreToken::Neg => {
                for x in stack.last_mut().unwrap() {
                    *x = f.neg(*x);
                }
            }
            PreToken::Pow(e) => {
                let a = stack.last_mut().unwrap();
                if e < 0 {
                    let ones = vec![1; w];
                    invert(a, &ones, &mut err);
                }
                for x in a.iter_mut() {
                    *x = f.pow(*x, e.unsigned_abs());
                }
            }
            op => {
                let mut b = stack.pop().unwrap();
                let a = stack.last_mut().unwrap();
                match op {
                    PreToken::Add => a.iter_mut().zip(&b).for_each(|(x, y)| *x = f.add(*x, *y)),
                    PreToken::Sub => a.iter_mut().zip(&b).for_each(|(x, y)| *x = f.sub(*x, *y)),
                    PreToken::Mul => a.iter_mut().zip(&b).for_each(|(x, y)| *x = f.mul(*x, *y)),
                    PreToken::Div => {
                        invert(&mut b, a, &mut err);
                        a.iter_mut().zip(&b).for_each(|(x, y)| *x = f.mul(*x, *y));
                    }
                    _ => unreachable!(),
                }
                spare.push(b);
            }
        }
    }
    let top = stack.pop().unwrap_or_else(|| vec![0; w]);
    top.into_iter()
        .zip(err)
        .map(|(v, e)| match e {
            Some(e) => Err(e),
            None => Ok(v),
        })
        .collect()
}

impl PreEvaluatedProgram {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn evaluate(&self, values: &[u64]) -> Result<u64, FieldError> {
        self.evaluate_with(values, &mut Vec::new())
    }

    pub fn evaluate_with(&self, values: &[u64], stack: &mut Vec<u64>) -> Result<u64, FieldError> {
        run(
            self.field,
            self.tokens.iter().map(|&t| (t, None)),
            values,
            stack,
            |_| unreachable!(),
        )
    }

    pub fn evaluate_bunch(&self, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        bunch(self.field, &self.tokens, points)
    }
}

/// Maps numbers to the field and folds constant subexpressions. Fails with
/// a bad-prime error when `p` divides a denominator.
pub fn precompute_tokens(program: &PostfixProgram, field: PrimeField) -> Result<PreEvaluatedProgram, FieldError> {
    let f = field;
    let mut out: Vec<PreToken> = Vec::with_capacity(program.tokens.len());
    for t in &program.tokens {
        let next = match t {
            Token::Num(q) => PreToken::Const(f.from_rational(q)?),
            other => op_of(other),
        };
        let n = out.len();
        let folded = match (next, out.as_slice()) {
            (PreToken::Neg, [.., PreToken::Const(a)]) => Some((1, Ok(f.neg(*a)))),
            (PreToken::Pow(e), [.., PreToken::Const(a)]) => Some((1, pow_i(f, *a, e))),
            (
                op @ (PreToken::Add | PreToken::Sub | PreToken::Mul | PreToken::Div),
                [.., PreToken::Const(a), PreToken::Const(b)],
            ) => Some((2, binary(f, op, *a, *b))),
            _ => None,
        };
        match folded {
            Some((k, Ok(v))) => {
                out.truncate(n - k);
                out.push(PreToken::Const(v));
            }
            // a constant division by zero stays in place and fails at evaluation
            _ => out.push(next),
        }
    }
    Ok(PreEvaluatedProgram {
        tokens: out,
        field,
        n_vars: program.n_vars,
    })
}

/// Evaluates every program at one point, results in program order.
pub fn evaluate(programs: &[PostfixProgram], field: PrimeField, values: &[u64]) -> Vec<Result<u64, FieldError>> {
    let mut stack = Vec::new();
    programs.iter().map(|p| p.evaluate_with(field, values, &mut stack)).collect()
}

pub fn evaluate_pre(programs: &[PreEvaluatedProgram], values: &[u64]) -> Vec<Result<u64, FieldError>> {
    let mut stack = Vec::new();
    programs.iter().map(|p| p.evaluate_with(values, &mut stack)).collect()
}

/// Merges programs that agree at two random points in each of two prime
/// fields. Returns the unique programs and, for every input position, the
/// index of its representative.
pub fn deduplicate(programs: &[PostfixProgram]) -> (Vec<PostfixProgram>, Vec<usize>) {
    let n = programs.first().map_or(0, |p| p.n_vars);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut probes = vec![];
    for k in 0..2 {
        let f = prime_sequence(k).unwrap();
        for _ in 0..2 {
            probes.push((f, (0..n).map(|_| rng.gen_range(1..f.p())).collect::<Vec<_>>()));
        }
    }
    let mut seen: HashMap<Vec<Option<u64>>, usize> = HashMap::new();
    let mut unique = vec![];
    let mut map = Vec::with_capacity(programs.len());
    for p in programs {
        let key: Vec<Option<u64>> = probes.iter().map(|(f, x)| p.evaluate(*f, x).ok()).collect();
        let idx = *seen.entry(key).or_insert_with(|| {
            unique.push(p.clone());
            unique.len() - 1
        });
        map.push(idx);
    }
    (unique, map)
}
