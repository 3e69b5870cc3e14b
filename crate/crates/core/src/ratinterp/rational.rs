use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::RatError;
use crate::numtheory::{BigRational, FieldError, PrimeField};
use crate::polyinterp::{Monomial, SparsePoly};

fn total(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Key of the term fixed to 1 by canonical normalization: lowest total
/// degree, then lexicographically smallest exponent vector.
fn norm_key<'a, I: Iterator<Item = &'a Monomial>>(it: I) -> Option<&'a Monomial> {
    it.min_by(|a, b| total(a).cmp(&total(b)).then_with(|| a.cmp(b)))
}

/// Rational function over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionFF {
    pub num: SparsePoly,
    pub den: SparsePoly,
}

impl RationalFunctionFF {
    pub fn new(num: SparsePoly, den: SparsePoly) -> Result<Self, RatError> {
        if den.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn field(&self) -> PrimeField {
        self.den.field()
    }

    pub fn n_vars(&self) -> usize {
        self.den.n_vars()
    }

    pub fn zero(field: PrimeField, n_vars: usize) -> Self {
        Self {
            num: SparsePoly::zero(field, n_vars),
            den: SparsePoly::constant(field, n_vars, 1),
        }
    }

    /// Scales so the denominator's normalization term has coefficient 1.
    pub fn canonical(&self) -> Self {
        let f = self.field();
        let key = norm_key(self.den.terms().keys()).expect("nonzero denominator");
        let inv = f.inv(*self.den.terms().get(key).unwrap()).unwrap();
        Self {
            num: self.num.scale(inv),
            den: self.den.scale(inv),
        }
    }

    pub fn eval(&self, point: &[u64]) -> Result<u64, FieldError> {
        let f = self.field();
        f.div(self.num.eval(point), self.den.eval(point))
    }
}

/// Polynomial with exact rational coefficients.
pub type QPoly = BTreeMap<Monomial, BigRational>;

pub fn qpoly_mul(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = QPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let e = r.entry(m).or_insert_with(BigRational::zero);
            *e += ca * cb;
        }
    }
    r.retain(|_, c| !c.is_zero());
    r
}

pub fn qpoly_to_ff(p: &QPoly, field: PrimeField, n_vars: usize) -> Result<SparsePoly, FieldError> {
    let mut out = SparsePoly::zero(field, n_vars);
    for (m, c) in p {
        out.add_term(m.clone(), field.from_rational(c)?);
    }
    Ok(out)
}

/// Rational function with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionQ {
    pub n_vars: usize,
    pub num: QPoly,
    pub den: QPoly,
}

impl RationalFunctionQ {
    pub fn constant(n_vars: usize, c: BigRational) -> Self {
        let mut num = QPoly::new();
        if !c.is_zero() {
            num.insert(vec![0; n_vars], c);
        }
        let mut den = QPoly::new();
        den.insert(vec![0; n_vars], BigRational::one());
        Self { n_vars, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn canonical(&self) -> Self {
        let key = norm_key(self.den.keys()).expect("nonzero denominator");
        let c = self.den[key].clone();
        let scale = |p: &QPoly| p.iter().map(|(m, x)| (m.clone(), x / &c)).collect();
        let mut out = Self {
            n_vars: self.n_vars,
            num: scale(&self.num),
            den: scale(&self.den),
        };
        if out.num.is_empty() {
            out.den = QPoly::new();
            out.den.insert(vec![0; self.n_vars], BigRational::one());
        }
        out
    }

    pub fn to_ff(&self, field: PrimeField) -> Result<RationalFunctionFF, FieldError> {
        Ok(RationalFunctionFF {
            num: qpoly_to_ff(&self.num, field, self.n_vars)?,
            den: qpoly_to_ff(&self.den, field, self.n_vars)?,
        })
    }

    pub fn eval_ff(&self, field: PrimeField, point: &[u64]) -> Result<u64, FieldError> {
        self.to_ff(field)?.eval(point)
    }

    /// Multiplies in polynomial factors, `num_factor / den_factor`.
    pub fn with_factors(&self, num_factor: &QPoly, den_factor: &QPoly) -> Self {
        Self {
            n_vars: self.n_vars,
            num: qpoly_mul(&self.num, num_factor),
            den: qpoly_mul(&self.den, den_factor),
        }
        .canonical()
    }

    /// Renames variables: internal variable `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let map = |p: &QPoly| {
            p.iter()
                .map(|(m, c)| {
                    let mut e = vec![0; m.len()];
                    for (i, &x) in m.iter().enumerate() {
                        e[perm[i]] = x;
                    }
                    (e, c.clone())
                })
                .collect()
        };
        Self {
            n_vars: self.n_vars,
            num: map(&self.num),
            den: map(&self.den),
        }
    }

    /// Canonical infix text, terms ordered by total degree then exponent
    /// vector.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.num.is_empty() {
            return "0".into();
        }
        let num = poly_text(&self.num, names);
        let den_is_one = self.den.len() == 1 && self.den.iter().all(|(m, c)| total(m) == 0 && c.is_one());
        if den_is_one {
            return num;
        }
        let wrap = |p: &QPoly, s: String| if p.len() > 1 { format!("({s})") } else { s };
        let den_text = poly_text(&self.den, names);
        let den_simple = self.den.len() == 1 && self.den.values().all(|c| c.is_one());
        let den = if den_simple { den_text } else { format!("({den_text})") };
        format!("{}/{}", wrap(&self.num, num), den)
    }
}

fn rational_text(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn mono_text(m: &[u32], names: &[String]) -> String {
    let mut parts = vec![];
    for (i, &e) in m.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Terms in canonical order with signs folded into the joins.
pub fn poly_text(p: &QPoly, names: &[String]) -> String {
    let mut terms: Vec<(&Monomial, &BigRational)> = p.iter().collect();
    terms.sort_by(|a, b| total(a.0).cmp(&total(b.0)).then_with(|| a.0.cmp(b.0)));
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if neg {
            out.push('-');
        } else if k > 0 {
            out.push('+');
        }
        let mono = mono_text(m, names);
        if mono.is_empty() {
            out.push_str(&rational_text(&abs));
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            let _ = write!(out, "{}*{}", rational_text(&abs), mono);
        }
    }
    out
}

/// Multiplies each term by `x_0^(d - deg)`, restoring a homogeneous
/// polynomial of degree `d` from its dehomogenization in `x_1..`.
pub fn homogenize(poly: &SparsePoly, t_degree: u32) -> Result<SparsePoly, RatError> {
    let f = poly.field();
    let n = poly.n_vars() + 1;
    let mut out = SparsePoly::zero(f, n);
    for (m, &c) in poly.terms() {
        let deg = total(m);
        if deg > t_degree {
            return Err(RatError::DegreeOverflow { degree: deg, bound: t_degree });
        }
        let mut e = Vec::with_capacity(n);
        e.push(t_degree - deg);
        e.extend_from_slice(m);
        out.add_term(e, c);
    }
    Ok(out)
}

/// Drops the exponent of `x_0`.
pub fn dehomogenize(poly: &SparsePoly) -> SparsePoly {
    let f = poly.field();
    SparsePoly::from_terms(
        f,
        poly.n_vars() - 1,
        poly.terms().iter().map(|(m, &c)| (m[1..].to_vec(), c)),
    )
}

fn binomial_row(field: PrimeField, n: u32) -> Vec<u64> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = 1;
    row.push(1);
    for k in 0..n {
        c = field.mul(c, field.reduce((n - k) as u64));
        c = field.div(c, field.reduce((k + 1) as u64)).unwrap();
        row.push(c);
    }
    row
}

/// `poly(x + shift)`, expanded.
pub fn shift_expand(poly: &SparsePoly, shift: &[u64]) -> SparsePoly {
    let f = poly.field();
    let mut out = SparsePoly::zero(f, poly.n_vars());
    let active: Vec<usize> = (0..shift.len()).filter(|&i| f.reduce(shift[i]) != 0).collect();
    for (m, &c) in poly.terms() {
        let mut acc: Vec<(Monomial, u64)> = vec![(m.clone(), c)];
        for &i in &active {
            let a = m[i];
            if a == 0 {
                continue;
            }
            let row = binomial_row(f, a);
            let s = f.reduce(shift[i]);
            let spow: Vec<u64> = (0..=a).scan(1, |p, _| {
                let r = *p;
                *p = f.mul(*p, s);
                Some(r)
            }).collect();
            let mut next = Vec::with_capacity(acc.len() * (a as usize + 1));
            for (e, x) in &acc {
                for j in 0..=a {
                    let mut e2 = e.clone();
                    e2[i] = j;
                    let coef = f.mul(*x, f.mul(row[j as usize], spow[(a - j) as usize]));
                    next.push((e2, coef));
                }
            }
            acc = next;
        }
        for (e, x) in acc {
            out.add_term(e, x);
        }
    }
    out
}

/// Splits a polynomial into homogeneous parts keyed by total degree.
pub fn homogeneous_parts(poly: &SparsePoly) -> BTreeMap<u32, SparsePoly> {
    let mut out: BTreeMap<u32, SparsePoly> = BTreeMap::new();
    for (m, &c) in poly.terms() {
        out.entry(total(m))
            .or_insert_with(|| SparsePoly::zero(poly.field(), poly.n_vars()))
            .add_term(m.clone(), c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn names() -> Vec<String> {
        vec!["z1".into(), "z2".into()]
    }

    #[test]
    fn homogenize_pads_first_variable() {
        let f = PrimeField::new(101).unwrap();
        let p = SparsePoly::from_terms(f, 1, [(vec![2], 1), (vec![0], 3)]);
        let h = homogenize(&p, 3).unwrap();
        assert_eq!(h.coeff(&[1, 2]).value(), 1);
        assert_eq!(h.coeff(&[3, 0]).value(), 3);
        let c = SparsePoly::from_terms(f, 1, [(vec![0], 1)]);
        assert_eq!(homogenize(&c, 5).unwrap().coeff(&[5, 0]).value(), 1);
        assert!(homogenize(&p, 1).is_err());
    }

    #[test]
    fn shift_expansion_matches_evaluation() {
        let f = PrimeField::new(1_000_003).unwrap();
        let p = SparsePoly::from_terms(f, 2, [(vec![1, 3], 1), (vec![2, 2], 5), (vec![0, 5], 7)]);
        let s = shift_expand(&p, &[0, 2]);
        for x in [(3u64, 4u64), (10, 17), (99, 5)] {
            assert_eq!(s.eval(&[x.0, x.1]), p.eval(&[x.0, f.add(x.1, 2)]));
        }
    }

    #[test]
    fn canonical_text() {
        let mut num = QPoly::new();
        for m in [vec![1, 3], vec![2, 2], vec![3, 1], vec![4, 0], vec![0, 5]] {
            num.insert(m, q(1, 1));
        }
        let mut den = QPoly::new();
        den.insert(vec![0, 1], q(1, 1));
        let r = RationalFunctionQ { n_vars: 2, num, den };
        assert_eq!(r.to_text(&names()), "(z1*z2^3+z1^2*z2^2+z1^3*z2+z1^4+z2^5)/z2");
    }

    #[test]
    fn canonical_text_signs_and_fractions() {
        let mut num = QPoly::new();
        num.insert(vec![0, 0], q(-12, 1));
        num.insert(vec![1, 0], q(13, 7));
        let mut den = QPoly::new();
        den.insert(vec![1, 0], q(2, 1));
        den.insert(vec![0, 1], q(-4, 1));
        let r = RationalFunctionQ { n_vars: 2, num, den }.canonical();
        // z2 is the lexicographically smaller degree-one key
        assert_eq!(r.to_text(&names()), "(3-13/28*z1)/(z2-1/2*z1)");
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let f = PrimeField::new(101).unwrap();
        let r = RationalFunctionFF::new(
            SparsePoly::from_terms(f, 2, [(vec![1, 0], 3)]),
            SparsePoly::from_terms(f, 2, [(vec![1, 0], 5), (vec![0, 1], 7)]),
        )
        .unwrap();
        let c = r.canonical();
        assert_eq!(c.den.coeff(&[0, 1]).value(), 1);
        assert_eq!(c.canonical(), c);
    }
}
