use super::{FieldError, PrimeField};

/// The 32 largest primes below 2^63, in descending order.
///
/// Compiled in so that multi-prime runs are reproducible across machines.
pub const PRIMES: [u64; 32] = [
    9223372036854775783,
    9223372036854775643,
    9223372036854775549,
    9223372036854775507,
    9223372036854775433,
    9223372036854775421,
    9223372036854775417,
    9223372036854775399,
    9223372036854775351,
    9223372036854775337,
    9223372036854775291,
    9223372036854775279,
    9223372036854775259,
    9223372036854775181,
    9223372036854775159,
    9223372036854775139,
    9223372036854775097,
    9223372036854775073,
    9223372036854775057,
    9223372036854774959,
    9223372036854774937,
    9223372036854774917,
    9223372036854774893,
    9223372036854774797,
    9223372036854774739,
    9223372036854774713,
    9223372036854774679,
    9223372036854774629,
    9223372036854774587,
    9223372036854774571,
    9223372036854774559,
    9223372036854774511,
];

/// The `index`-th field of the built-in prime list.
pub fn prime_sequence(index: usize) -> Result<PrimeField, FieldError> {
    let p = *PRIMES.get(index).ok_or(FieldError::IndexOutOfRange {
        index,
        len: PRIMES.len(),
    })?;
    PrimeField::new(p)
}
