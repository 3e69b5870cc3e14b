//! Scan for univariate polynomial factors of a black box before the actual
//! interpolation, and the variable reordering by maximal degree.

mod factorize;
mod scan;

pub use factorize::{
    common_factors, distinct_degree, equal_degree, factorize_univariate_ff, is_irreducible, squarefree,
    FFFactorization,
};
pub use scan::{
    full_scan, scan_variable, scan_variable_in_field, FactorLift, FactorScanConfig, FactorScanResult, FieldScan,
    UniPolyZ, VariableScan,
};

use crate::numtheory::FieldError;
use crate::ratinterp::RatError;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FactorError {
    #[error("cannot factor the zero polynomial")]
    ZeroPolynomial,
    #[error("factor of variable {0} did not lift within the prime budget")]
    Exhausted(usize),
    #[error("singular system for the second sample")]
    Singular,
    #[error(transparent)]
    Rat(#[from] RatError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
