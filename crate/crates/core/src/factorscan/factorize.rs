//! Univariate factorization over prime fields: squarefree decomposition,
//! distinct-degree and equal-degree (Cantor–Zassenhaus) splitting.

use rand::Rng;

use super::FactorError;
use crate::numtheory::PrimeField;
use crate::polyinterp::DensePolyFF;

/// `unit * prod(factor^mult)` with monic irreducible factors, sorted by
/// degree then coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFFactorization {
    pub unit: u64,
    pub factors: Vec<(DensePolyFF, u32)>,
}

impl FFFactorization {
    pub fn expand(&self, field: PrimeField) -> DensePolyFF {
        self.factors
            .iter()
            .fold(DensePolyFF::constant(field, self.unit), |acc, (p, m)| acc.mul(&p.pow(*m as u64)))
    }
}

fn x(field: PrimeField) -> DensePolyFF {
    DensePolyFF::monomial(field, 1, 1)
}

/// `g` with `g(z)^p = f(z)`, for `f' = 0`.
fn pth_root(f: &DensePolyFF) -> DensePolyFF {
    let p = f.field().p() as usize;
    let c: Vec<u64> = f.coeffs().iter().step_by(p).copied().collect();
    DensePolyFF::new(f.field(), c)
}

fn exact_div(a: &DensePolyFF, b: &DensePolyFF) -> DensePolyFF {
    a.divrem(b).expect("nonzero divisor").0
}

/// Squarefree decomposition of a monic polynomial.
pub fn squarefree(f: &DensePolyFF) -> Vec<(DensePolyFF, u32)> {
    let p = f.field().p() as u32;
    if f.degree().unwrap_or(0) == 0 {
        return vec![];
    }
    let d = f.derivative();
    if d.is_zero() {
        return squarefree(&pth_root(f)).into_iter().map(|(g, m)| (g, m * p)).collect();
    }
    let mut out = vec![];
    let mut c = f.gcd(&d);
    let mut w = exact_div(f, &c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = exact_div(&w, &y);
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = exact_div(&c, &w);
    }
    if !c.is_one() {
        out.extend(squarefree(&pth_root(&c)).into_iter().map(|(g, m)| (g, m * p)));
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree.
pub fn distinct_degree(f: &DensePolyFF) -> Vec<(DensePolyFF, u32)> {
    let field = f.field();
    let mut out = vec![];
    let mut rest = f.clone();
    let mut h = x(field).rem(&rest);
    let mut i = 1;
    while rest.degree().unwrap() >= 2 * i {
        h = h.pow_mod(field.p() as u128, &rest);
        let g = h.sub(&x(field)).gcd(&rest);
        if !g.is_one() {
            rest = exact_div(&rest, &g);
            h = h.rem(&rest);
            out.push((g, i as u32));
        }
        i += 1;
    }
    if rest.degree().unwrap() > 0 {
        let d = rest.degree().unwrap() as u32;
        out.push((rest, d));
    }
    out
}

/// `a^((p^d - 1) / 2) - 1 mod f`; fields have odd characteristic.
fn splitter(a: &DensePolyFF, d: u32, f: &DensePolyFF) -> DensePolyFF {
    let p = f.field().p();
    let mut b = a.clone();
    // a^(1 + p + .. + p^(d-1)) lies in the prime field
    let mut acc = a.clone();
    for _ in 1..d {
        b = b.pow_mod(p as u128, f);
        acc = acc.mul(&b).rem(f);
    }
    acc.pow_mod(((p - 1) / 2) as u128, f).sub(&DensePolyFF::one(f.field()))
}

/// Splits a product of distinct irreducibles of degree `d`.
pub fn equal_degree<R: Rng>(f: &DensePolyFF, d: u32, rng: &mut R) -> Vec<DensePolyFF> {
    let n = f.degree().unwrap();
    if n as u32 == d {
        return vec![f.clone()];
    }
    let field = f.field();
    loop {
        let a = DensePolyFF::new(field, (0..n).map(|_| rng.gen_range(0..field.p())).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = splitter(&a, d, f).gcd(f);
        let k = g.degree().unwrap_or(0);
        if k > 0 && k < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&exact_div(f, &g), d, rng));
            return out;
        }
    }
}

fn sort_key(p: &DensePolyFF) -> (usize, Vec<u64>) {
    (p.degree().unwrap_or(0), p.coeffs().to_vec())
}

/// Complete factorization into monic irreducibles.
pub fn factorize_univariate_ff<R: Rng>(poly: &DensePolyFF, rng: &mut R) -> Result<FFFactorization, FactorError> {
    if poly.is_zero() {
        return Err(FactorError::ZeroPolynomial);
    }
    let unit = poly.lead();
    let mut factors = vec![];
    for (sqf, m) in squarefree(&poly.monic()) {
        for (part, d) in distinct_degree(&sqf) {
            for g in equal_degree(&part, d, rng) {
                factors.push((g, m));
            }
        }
    }
    factors.sort_by_key(|(p, m)| (sort_key(p), *m));
    Ok(FFFactorization { unit, factors })
}

/// Irreducibility certificate via distinct-degree splitting.
pub fn is_irreducible(f: &DensePolyFF) -> bool {
    let Some(n) = f.degree() else { return false };
    if n == 0 {
        return false;
    }
    let m = f.monic();
    if m.gcd(&m.derivative()).degree() != Some(0) {
        return false;
    }
    let dd = distinct_degree(&m);
    dd.len() == 1 && dd[0].1 as usize == n
}

/// Common factors of two factorizations, each with the smaller multiplicity.
pub fn common_factors(a: &[(DensePolyFF, u32)], b: &[(DensePolyFF, u32)]) -> Vec<(DensePolyFF, u32)> {
    a.iter()
        .filter_map(|(p, m)| b.iter().find(|(q, _)| q == p).map(|(_, n)| (p.clone(), (*m).min(*n))))
        .collect()
}
