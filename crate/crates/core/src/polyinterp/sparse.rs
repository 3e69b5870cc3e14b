use std::collections::BTreeMap;
use std::fmt;

use crate::numtheory::{FieldElement, PrimeField};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial over a prime field.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    field: PrimeField,
    n_vars: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl SparsePoly {
    pub fn zero(field: PrimeField, n_vars: usize) -> Self {
        Self {
            field,
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, n_vars: usize, c: u64) -> Self {
        let mut p = Self::zero(field, n_vars);
        p.add_term(vec![0; n_vars], c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, u64)>>(field: PrimeField, n_vars: usize, it: I) -> Self {
        let mut p = Self::zero(field, n_vars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[u32]) -> FieldElement {
        self.field.elem(self.terms.get(m).copied().unwrap_or(0))
    }

    /// Adds `c * x^m`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: u64) {
        assert_eq!(m.len(), self.n_vars, "exponent vector length");
        let c = self.field.reduce(c);
        if c == 0 {
            return;
        }
        let f = self.field;
        let e = self.terms.entry(m);
        match e {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        assert_eq!(point.len(), self.n_vars);
        let f = self.field;
        let mut acc = 0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (x, &e) in point.iter().zip(m) {
                if e > 0 {
                    t = f.mul(t, f.pow(*x, e as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, &c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, &c) in &o.terms {
            r.add_term(m.clone(), self.field.neg(c));
        }
        r
    }

    pub fn scale(&self, s: u64) -> Self {
        let f = self.field;
        Self::from_terms(f, self.n_vars, self.terms.iter().map(|(m, &c)| (m.clone(), f.mul(c, s))))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let f = self.field;
        let mut r = Self::zero(f, self.n_vars);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &o.terms {
                let m = a.iter().zip(b).map(|(x, y)| x + y).collect();
                r.add_term(m, f.mul(ca, cb));
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_removes_terms() {
        let f = PrimeField::new(101).unwrap();
        let mut p = SparsePoly::zero(f, 2);
        p.add_term(vec![1, 0], 5);
        p.add_term(vec![1, 0], 96);
        assert!(p.is_zero());
    }

    #[test]
    fn evaluation() {
        let f = PrimeField::new(101).unwrap();
        let p = SparsePoly::from_terms(f, 2, [(vec![1, 1], 1), (vec![0, 2], 3)]);
        assert_eq!(p.eval(&[2, 5]), 85);
    }
}
