use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{FieldError, PrimeField};

/// A residue modulo the product of the primes combined so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSystem {
    residue: BigUint,
    modulus: BigUint,
}

impl ResidueSystem {
    pub fn new(residue: u64, prime: u64) -> Self {
        Self {
            residue: BigUint::from(residue % prime),
            modulus: BigUint::from(prime),
        }
    }

    pub fn from_parts(residue: BigUint, modulus: BigUint) -> Self {
        debug_assert!(residue < modulus);
        Self { residue, modulus }
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Adds one more congruence `x = residue (mod prime)`.
    pub fn combine(&self, residue: u64, prime: u64) -> Result<Self, FieldError> {
        let f = PrimeField::new(prime)?;
        let m_mod = f.from_biguint(&self.modulus);
        if m_mod == 0 {
            return Err(FieldError::RepeatedPrime(prime));
        }
        let r_mod = f.from_biguint(&self.residue);
        // x = r + m * ((residue - r) / m mod prime)
        let k = f.mul(f.sub(f.reduce(residue), r_mod), f.inv(m_mod)?);
        Ok(Self {
            residue: &self.residue + &self.modulus * BigUint::from(k),
            modulus: &self.modulus * BigUint::from(prime),
        })
    }
}

/// Chinese remaindering of `(residue, prime)` pairs.
pub fn crt_combine(parts: &[(u64, u64)]) -> Result<ResidueSystem, FieldError> {
    let mut acc = ResidueSystem {
        residue: BigUint::zero(),
        modulus: BigUint::one(),
    };
    for &(r, p) in parts {
        acc = acc.combine(r, p)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_mod_five_four_mod_seven() {
        let r = crt_combine(&[(3, 5), (4, 7)]).unwrap();
        let brute = (0u32..35).find(|x| x % 5 == 3 && x % 7 == 4).unwrap();
        assert_eq!(r.residue(), &BigUint::from(brute));
        assert_eq!(r.modulus(), &BigUint::from(35u32));
    }

    #[test]
    fn single_and_zero() {
        let r = crt_combine(&[(12, 101)]).unwrap();
        assert_eq!(r.residue(), &BigUint::from(12u32));
        let p1 = super::super::PRIMES[0];
        let p2 = super::super::PRIMES[1];
        let z = crt_combine(&[(0, p1), (0, p2)]).unwrap();
        assert!(z.residue().is_zero());
        assert_eq!(z.modulus(), &(BigUint::from(p1) * BigUint::from(p2)));
    }

    #[test]
    fn repeated_prime_is_rejected() {
        assert_eq!(
            crt_combine(&[(1, 7), (2, 7)]),
            Err(FieldError::RepeatedPrime(7))
        );
    }
}
