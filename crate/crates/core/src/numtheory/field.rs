use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;

use super::FieldError;

/// A prime field `Z_p` with `p` an odd prime below `2^63`.
///
/// The struct is `Copy`; containers that hold many residues store raw `u64`
/// values next to a single `PrimeField` rather than a `FieldElement` each.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
    // floor(2^128 / p), used for Barrett reduction of 128-bit products
    barrett: u128,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}", self.p)
    }
}

impl PrimeField {
    /// Builds the field after a deterministic Miller-Rabin check.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || p.is_multiple_of(2) || p >= 1 << 63 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self {
            p,
            barrett: u128::MAX / p as u128,
        })
    }

    #[inline]
    pub const fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn elem(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            field: self,
        }
    }

    #[inline]
    pub fn zero(self) -> FieldElement {
        FieldElement { value: 0, field: self }
    }

    #[inline]
    pub fn one(self) -> FieldElement {
        FieldElement { value: 1, field: self }
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u64 {
        if v >= self.p {
            v % self.p
        } else {
            v
        }
    }

    #[inline]
    pub fn from_i64(self, v: i64) -> u64 {
        let r = v.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn from_biguint(self, v: &BigUint) -> u64 {
        let radix = ((1u128 << 64) % self.p as u128) as u64;
        v.iter_u64_digits()
            .rev()
            .fold(0, |r, d| self.mul_add(r, radix, self.reduce(d)))
    }

    pub fn from_bigint(self, v: &BigInt) -> u64 {
        let m = self.from_biguint(v.magnitude());
        if v.sign() == Sign::Minus {
            self.neg(m)
        } else {
            m
        }
    }

    /// Image of a rational number; fails when `p` divides the denominator.
    pub fn from_rational(self, q: &BigRational) -> Result<u64, FieldError> {
        let den = self.from_bigint(q.denom());
        if den == 0 {
            return Err(FieldError::BadPrime(self.p));
        }
        let num = self.from_bigint(q.numer());
        if den == 1 {
            return Ok(num);
        }
        Ok(self.mul(num, self.inv(den)?))
    }

    /// Symmetric lift to `(-p/2, p/2]`.
    pub fn to_signed(self, v: u64) -> i64 {
        if v > self.p / 2 {
            -((self.p - v) as i64)
        } else {
            v as i64
        }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce_u128(a as u128 * b as u128)
    }

    /// `a*b + c`, saving one reduction.
    #[inline]
    pub fn mul_add(self, a: u64, b: u64, c: u64) -> u64 {
        self.reduce_u128(a as u128 * b as u128 + c as u128)
    }

    #[inline]
    fn reduce_u128(self, x: u128) -> u64 {
        let q = mulhi(x, self.barrett);
        let mut r = x.wrapping_sub(q.wrapping_mul(self.p as u128));
        let p = self.p as u128;
        while r >= p {
            r -= p;
        }
        r as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u64) -> Result<u64, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroDivisor { dividend: 1 });
        }
        let (mut t, mut nt) = (0i64, 1i64);
        let (mut r, mut nr) = (self.p as i64, a as i64);
        while nr != 0 {
            let q = r / nr;
            (t, nt) = (nt, t - q * nt);
            (r, nr) = (nr, r - q * nr);
        }
        debug_assert_eq!(r, 1);
        if t < 0 {
            t += self.p as i64;
        }
        Ok(t as u64)
    }

    pub fn div(self, a: u64, b: u64) -> Result<u64, FieldError> {
        if b == 0 {
            return Err(FieldError::ZeroDivisor { dividend: a });
        }
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Inverts every entry in place with one field inversion (Montgomery's trick).
    pub fn batch_inv(self, xs: &mut [u64]) -> Result<(), FieldError> {
        let mut prefix = Vec::with_capacity(xs.len());
        let mut acc = 1;
        for &x in xs.iter() {
            if x == 0 {
                return Err(FieldError::ZeroDivisor { dividend: 1 });
            }
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = self.inv(acc)?;
        for i in (0..xs.len()).rev() {
            let x = xs[i];
            xs[i] = self.mul(inv, prefix[i]);
            inv = self.mul(inv, x);
        }
        Ok(())
    }
}

#[inline]
fn mulhi(x: u128, m: u128) -> u128 {
    let (x0, x1) = (x as u64 as u128, x >> 64);
    let (m0, m1) = (m as u64 as u128, m >> 64);
    let lo = x0 * m0;
    let a = x0 * m1;
    let b = x1 * m0;
    let mid = (lo >> 64) + (a as u64 as u128) + (b as u64 as u128);
    x1 * m1 + (a >> 64) + (b >> 64) + (mid >> 64)
}

/// Deterministic Miller-Rabin, exact for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, a);
            }
            a = mulm(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A residue together with its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.p)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Raises `a` to the integer value of `b`.
    Pow,
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(self, e: u64) -> Self {
        FieldElement {
            value: self.field.pow(self.value, e),
            field: self.field,
        }
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        Ok(FieldElement {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch {
                left: self.field.p,
                right: other.field.p,
            });
        }
        Ok(())
    }
}

/// Checked arithmetic between two elements; mixing fields is an error.
pub fn field_arith(a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement, FieldError> {
    if op == FieldOp::Pow {
        return Ok(a.pow(b.value));
    }
    a.check(&b)?;
    let f = a.field;
    let value = match op {
        FieldOp::Add => f.add(a.value, b.value),
        FieldOp::Sub => f.sub(a.value, b.value),
        FieldOp::Mul => f.mul(a.value, b.value),
        FieldOp::Div => f.div(a.value, b.value)?,
        FieldOp::Pow => unreachable!(),
    };
    Ok(FieldElement { value, field: f })
}

macro_rules! impl_op {
    ($tr:ident, $m:ident, $op:expr) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                match field_arith(self, rhs, $op) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}

impl_op!(Add, add, FieldOp::Add);
impl_op!(Sub, sub, FieldOp::Sub);
impl_op!(Mul, mul, FieldOp::Mul);
impl_op!(Div, div, FieldOp::Div);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_seven_mod_101() {
        let f = PrimeField::new(101).unwrap();
        let x = f.elem(7).inv().unwrap();
        assert_eq!(x.value(), 29);
        assert_eq!(f.mul(7, 29), 1);
    }

    #[test]
    fn small_products_and_powers() {
        let f = PrimeField::new(509).unwrap();
        assert_eq!((f.elem(5) * f.elem(17)).value(), 85);
        assert_eq!(f.elem(123).pow(0).value(), 1);
        assert_eq!(f.pow(2, 10), 1024 % 509);
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = PrimeField::new(101).unwrap().elem(3);
        let b = PrimeField::new(103).unwrap().elem(3);
        assert!(matches!(
            field_arith(a, b, FieldOp::Add),
            Err(FieldError::FieldMismatch { .. })
        ));
    }

    #[test]
    fn zero_divisor_carries_dividend() {
        let f = PrimeField::new(101).unwrap();
        let e = field_arith(f.elem(42), f.zero(), FieldOp::Div).unwrap_err();
        assert_eq!(e, FieldError::ZeroDivisor { dividend: 42 });
    }

    #[test]
    fn barrett_matches_naive() {
        for p in [3u64, 17, 101, 9223372036854775783, 4611686018427388039] {
            let f = PrimeField::new(p).unwrap();
            let mut x = 0x1234_5678_9abc_def1u64 % p;
            for _ in 0..2000 {
                let y = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407) % p;
                assert_eq!(f.mul(x, y), ((x as u128 * y as u128) % p as u128) as u64);
                assert_eq!(
                    f.mul_add(x, y, p - 1),
                    ((x as u128 * y as u128 + (p - 1) as u128) % p as u128) as u64
                );
                x = y;
            }
            assert_eq!(f.mul(p - 1, p - 1), 1);
        }
    }

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(3215031751).is_err());
        assert!(is_prime(9223372036854775783));
    }

    #[test]
    fn batch_inverse() {
        let f = PrimeField::new(1_000_000_007).unwrap();
        let mut xs = vec![1, 2, 3, 999, 123456];
        let orig = xs.clone();
        f.batch_inv(&mut xs).unwrap();
        for (a, b) in orig.iter().zip(&xs) {
            assert_eq!(f.mul(*a, *b), 1);
        }
    }
}
