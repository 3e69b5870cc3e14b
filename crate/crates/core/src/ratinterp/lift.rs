use std::collections::BTreeMap;

use super::{QPoly, RatError, RationalFunctionFF, RationalFunctionQ};
use crate::numtheory::{crt_combine, rational_reconstruct};
use crate::polyinterp::{Monomial, SparsePoly};

fn lift_poly(polys: &[(&SparsePoly, u64)]) -> Result<Option<QPoly>, RatError> {
    let (first, _) = polys[0];
    let mut out = BTreeMap::new();
    for m in first.terms().keys() {
        let parts: Vec<(u64, u64)> = polys.iter().map(|(p, prime)| (p.coeff(m).value(), *prime)).collect();
        let sys = crt_combine(&parts)?;
        match rational_reconstruct(sys.residue(), sys.modulus()) {
            Some(q) => {
                out.insert(m.clone(), q);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn same_support(a: &SparsePoly, b: &SparsePoly) -> bool {
    a.len() == b.len() && a.terms().keys().zip(b.terms().keys()).all(|(x, y): (&Monomial, &Monomial)| x == y)
}

/// Combines canonical per-prime results by CRT and rational reconstruction.
///
/// Returns `Ok(None)` when some coefficient needs more primes.
pub fn lift_to_q(results: &[(RationalFunctionFF, u64)]) -> Result<Option<RationalFunctionQ>, RatError> {
    let Some((first, _)) = results.first() else {
        return Ok(None);
    };
    for (r, _) in &results[1..] {
        if !same_support(&r.num, &first.num) || !same_support(&r.den, &first.den) {
            return Err(RatError::SkeletonMismatch);
        }
    }
    let nums: Vec<_> = results.iter().map(|(r, p)| (&r.num, *p)).collect();
    let dens: Vec<_> = results.iter().map(|(r, p)| (&r.den, *p)).collect();
    let (Some(num), Some(den)) = (lift_poly(&nums)?, lift_poly(&dens)?) else {
        return Ok(None);
    };
    Ok(Some(RationalFunctionQ {
        n_vars: first.n_vars(),
        num,
        den,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{prime_sequence, BigRational, PrimeField};
    use num_bigint::BigInt;

    fn constant(f: PrimeField, v: u64) -> RationalFunctionFF {
        RationalFunctionFF::new(SparsePoly::constant(f, 1, v), SparsePoly::constant(f, 1, 1)).unwrap()
    }

    #[test]
    fn small_integers_on_one_prime() {
        let f = prime_sequence(0).unwrap();
        let q = lift_to_q(&[(constant(f, f.from_i64(-5)), f.p())]).unwrap().unwrap();
        assert_eq!(q.num[&vec![0]], BigRational::from_integer((-5).into()));
    }

    #[test]
    fn thirteen_sevenths_over_two_primes() {
        let r = BigRational::new(13.into(), 7.into());
        let parts: Vec<_> = (0..2)
            .map(|i| {
                let f = prime_sequence(i).unwrap();
                (constant(f, f.from_rational(&r).unwrap()), f.p())
            })
            .collect();
        assert_eq!(lift_to_q(&parts).unwrap().unwrap().num[&vec![0]], r);
    }

    #[test]
    fn forty_digit_numerator_defers() {
        let big: BigInt = "1234567890123456789012345678901234567891".parse().unwrap();
        let f = prime_sequence(0).unwrap();
        let v = f.from_bigint(&big);
        assert!(lift_to_q(&[(constant(f, v), f.p())]).unwrap().is_none());
    }

    #[test]
    fn skeleton_mismatch_is_error() {
        let f0 = prime_sequence(0).unwrap();
        let f1 = prime_sequence(1).unwrap();
        let a = constant(f0, 3);
        let b = RationalFunctionFF::new(SparsePoly::from_terms(f1, 1, [(vec![1], 3)]), SparsePoly::constant(f1, 1, 1)).unwrap();
        assert_eq!(lift_to_q(&[(a, f0.p()), (b, f1.p())]), Err(RatError::SkeletonMismatch));
    }
}
