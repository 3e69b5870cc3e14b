//! Prime fields, the built-in prime sequence, Chinese remaindering and
//! rational reconstruction.

mod crt;
mod field;
mod primes;
mod ratrec;

pub use crt::{crt_combine, ResidueSystem};
pub use field::{field_arith, is_prime, FieldElement, FieldOp, PrimeField};
pub use num_rational::BigRational;
pub use primes::{prime_sequence, PRIMES};
pub use ratrec::{rational_reconstruct, rational_reconstruct_with, ReconstructionMode, MQRR_EXTRA_BITS};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("division of {dividend} by zero")]
    ZeroDivisor { dividend: u64 },
    #[error("operands from different fields (Z_{left} and Z_{right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("{0} is not an odd prime below 2^63")]
    NotPrime(u64),
    #[error("prime index {index} out of range (only {len} primes are built in)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("prime {0} used twice in a residue system")]
    RepeatedPrime(u64),
    #[error("a coefficient denominator vanishes modulo {0}")]
    BadPrime(u64),
}
