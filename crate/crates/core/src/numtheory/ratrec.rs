use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Acceptance rule for rational reconstruction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReconstructionMode {
    /// Monagan's maximal-quotient rule: accept the convergent following the
    /// largest quotient, provided that quotient is large enough.
    #[default]
    MaximalQuotient,
    /// Wang's symmetric bound `|a|, b <= sqrt(m/2)`.
    Wang,
}

/// Extra bits required by the maximal-quotient rule; the acceptance threshold
/// is `2^MQRR_EXTRA_BITS * bitlen(m)`.
pub const MQRR_EXTRA_BITS: u32 = 10;

/// Recovers `a/b` from `residue = a * b^-1 mod modulus` using the default
/// (maximal-quotient) rule. `None` means more primes are needed.
pub fn rational_reconstruct(residue: &BigUint, modulus: &BigUint) -> Option<BigRational> {
    rational_reconstruct_with(residue, modulus, ReconstructionMode::MaximalQuotient)
}

pub fn rational_reconstruct_with(
    residue: &BigUint,
    modulus: &BigUint,
    mode: ReconstructionMode,
) -> Option<BigRational> {
    debug_assert!(residue < modulus);
    if residue.is_zero() {
        return Some(BigRational::zero());
    }
    match mode {
        ReconstructionMode::MaximalQuotient => mqrr(residue, modulus),
        ReconstructionMode::Wang => wang(residue, modulus),
    }
}

fn finish(n: BigInt, d: BigInt) -> Option<BigRational> {
    if d.is_zero() || !n.gcd(&d).is_one() {
        return None;
    }
    Some(BigRational::new_raw(n, d).reduced_sign())
}

trait ReducedSign {
    fn reduced_sign(self) -> Self;
}

impl ReducedSign for BigRational {
    fn reduced_sign(self) -> Self {
        let (n, d) = self.into();
        if d.is_negative() {
            BigRational::new_raw(-n, -d)
        } else {
            BigRational::new_raw(n, d)
        }
    }
}

fn mqrr(u: &BigUint, m: &BigUint) -> Option<BigRational> {
    let mut t_bound = BigInt::from(m.bits()) << MQRR_EXTRA_BITS;
    let (mut r0, mut r1) = (BigInt::from(m.clone()), BigInt::from(u.clone()));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    let mut best: Option<(BigInt, BigInt)> = None;
    while !r1.is_zero() && r0 > t_bound {
        let q = &r0 / &r1;
        if q > t_bound {
            best = Some((r1.clone(), t1.clone()));
            t_bound = q.clone();
        }
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    let (n, d) = best?;
    finish(n, d)
}

fn wang(u: &BigUint, m: &BigUint) -> Option<BigRational> {
    let bound = BigInt::from((m / 2u32).sqrt());
    let (mut r0, mut r1) = (BigInt::from(m.clone()), BigInt::from(u.clone()));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    if t1.abs() > bound {
        return None;
    }
    finish(r1, t1)
}
