use std::fmt;

use crate::numtheory::{FieldElement, FieldError, PrimeField};

/// Univariate polynomial over a prime field, coefficient `i` of degree `i`.
///
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DensePolyFF {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl fmt::Debug for DensePolyFF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} over {:?}", self.coeffs, self.field)
    }
}

impl fmt::Display for DensePolyFF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "{c}*z")?,
                (_, 1) => write!(f, "z^{i}")?,
                _ => write!(f, "{c}*z^{i}")?,
            }
        }
        Ok(())
    }
}

impl DensePolyFF {
    pub fn new(field: PrimeField, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c = field.reduce(*c);
        }
        let mut p = Self { field, coeffs };
        p.trim();
        p
    }

    pub fn zero(field: PrimeField) -> Self {
        Self { field, coeffs: vec![] }
    }

    pub fn one(field: PrimeField) -> Self {
        Self { field, coeffs: vec![1] }
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    /// `z - a`
    pub fn linear(field: PrimeField, a: u64) -> Self {
        Self::new(field, vec![field.neg(field.reduce(a)), 1])
    }

    pub fn monomial(field: PrimeField, c: u64, deg: usize) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        Self::new(field, v)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.field.elem(self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.mul_add(acc, x, c))
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| {
                f.add(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    o.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::new(f, v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| {
                f.sub(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    o.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::new(f, v)
    }

    pub fn scale(&self, c: u64) -> Self {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field);
        }
        let f = self.field;
        let mut v = vec![0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = f.mul_add(a, b, v[i + j]);
            }
        }
        Self::new(f, v)
    }

    /// Multiplication by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&self.coeffs);
        Self { field: self.field, coeffs: v }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut r = Self::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        r
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lead()).unwrap();
        self.scale(inv)
    }

    pub fn derivative(&self) -> Self {
        let f = self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.reduce(i as u64)))
            .collect();
        Self::new(f, v)
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), FieldError> {
        let f = self.field;
        let dd = d.degree().ok_or(FieldError::ZeroDivisor { dividend: 0 })?;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let inv = f.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        let mut q = vec![0; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = f.mul(r[i + dd], inv);
            q[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, b));
            }
        }
        r.truncate(dd);
        Ok((Self::new(f, q), Self::new(f, r)))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).unwrap().1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`
    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = Self::one(self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    /// Composition `self(z + a)`.
    pub fn taylor_shift(&self, a: u64) -> Self {
        let f = self.field;
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] = f.mul_add(a, c[j + 1], c[j]);
            }
        }
        Self::new(f, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f17() -> PrimeField {
        PrimeField::new(17).unwrap()
    }

    #[test]
    fn divrem_and_gcd() {
        let f = f17();
        let a = DensePolyFF::linear(f, 3).mul(&DensePolyFF::linear(f, 5));
        let b = DensePolyFF::linear(f, 3).mul(&DensePolyFF::linear(f, 7));
        assert_eq!(a.gcd(&b), DensePolyFF::linear(f, 3));
        let (q, r) = a.divrem(&DensePolyFF::linear(f, 5)).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, DensePolyFF::linear(f, 3));
    }

    #[test]
    fn taylor_shift_matches_eval() {
        let f = PrimeField::new(101).unwrap();
        let p = DensePolyFF::new(f, vec![3, 1, 4, 1, 5]);
        let s = p.taylor_shift(7);
        for x in 0..20 {
            assert_eq!(s.eval(x), p.eval(f.add(x, 7)));
        }
    }

    #[test]
    fn trimming() {
        let f = f17();
        assert!(DensePolyFF::new(f, vec![0, 0, 17]).is_zero());
        assert_eq!(DensePolyFF::new(f, vec![1, 2, 0]).degree(), Some(1));
    }
}
