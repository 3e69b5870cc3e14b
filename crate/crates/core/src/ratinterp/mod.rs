//! Rational function interpolation: Thiele in one variable, the shift scan,
//! the hybrid racer and the lift to exact rationals.

mod hybrid;
mod lift;
mod rational;
mod shift;
mod thiele;

pub use hybrid::{hybrid_racer, hybrid_racer_auto, solve_with_structure, CoefSupport, HybridConfig, HybridOutcome, Side, Structure};
pub use lift::lift_to_q;
pub use rational::{
    dehomogenize, homogeneous_parts, homogenize, poly_text, qpoly_mul, qpoly_to_ff, shift_expand, QPoly,
    RationalFunctionFF, RationalFunctionQ,
};
pub use shift::{scan_for_shift, Shift, ShiftScan};
pub use thiele::{thiele_interpolate, ThieleFeed, ThieleResult, ThieleState};

use crate::numtheory::{FieldError, PrimeField};
use crate::polyinterp::InterpError;
use thiserror::Error;

/// Default cap on discarded evaluation points per sub-task.
pub const MAX_RETRIES: usize = 16;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RatError {
    #[error("too many bad evaluation points ({0})")]
    TooManyBadPoints(usize),
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("term of degree {degree} exceeds the bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },
    #[error("shift leaves no constant term in numerator or denominator")]
    InvalidShift,
    #[error("monomial skeletons differ between primes")]
    SkeletonMismatch,
    #[error("unlucky choice of random values: {0}")]
    Unlucky(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Black-box access over one prime field, counting evaluations.
pub trait Probe {
    fn field(&self) -> PrimeField;
    fn n_vars(&self) -> usize;
    /// Evaluates at every point; an `Err` marks a bad point.
    fn probe(&mut self, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>>;
    fn count(&self) -> usize;

    fn probe_one(&mut self, point: Vec<u64>) -> Result<u64, FieldError> {
        self.probe(std::slice::from_ref(&point)).pop().unwrap()
    }
}

/// [`Probe`] over a plain closure.
pub struct FnProbe<F> {
    field: PrimeField,
    n_vars: usize,
    f: F,
    count: usize,
}

impl<F> FnProbe<F>
where
    F: FnMut(&[u64]) -> Result<u64, FieldError>,
{
    pub fn new(field: PrimeField, n_vars: usize, f: F) -> Self {
        Self {
            field,
            n_vars,
            f,
            count: 0,
        }
    }
}

impl<F> Probe for FnProbe<F>
where
    F: FnMut(&[u64]) -> Result<u64, FieldError>,
{
    fn field(&self) -> PrimeField {
        self.field
    }

    fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn probe(&mut self, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        self.count += points.len();
        points.iter().map(|p| (self.f)(p)).collect()
    }

    fn count(&self) -> usize {
        self.count
    }
}

/// The point `t * z + s`.
pub(crate) fn line_point(field: PrimeField, t: u64, z: &[u64], s: &[u64]) -> Vec<u64> {
    z.iter().zip(s).map(|(&zi, &si)| field.mul_add(t, zi, si)).collect()
}

/// A [`Probe`] that can be moved to another prime field.
pub trait MultiPrimeProbe: Probe {
    fn set_field(&mut self, field: PrimeField) -> Result<(), FieldError>;
}

/// [`MultiPrimeProbe`] over a closure taking the field explicitly.
pub struct FieldFnProbe<F> {
    field: PrimeField,
    n_vars: usize,
    f: F,
    count: usize,
}

impl<F> FieldFnProbe<F>
where
    F: FnMut(PrimeField, &[u64]) -> Result<u64, FieldError>,
{
    pub fn new(field: PrimeField, n_vars: usize, f: F) -> Self {
        Self {
            field,
            n_vars,
            f,
            count: 0,
        }
    }
}

impl<F> Probe for FieldFnProbe<F>
where
    F: FnMut(PrimeField, &[u64]) -> Result<u64, FieldError>,
{
    fn field(&self) -> PrimeField {
        self.field
    }

    fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn probe(&mut self, points: &[Vec<u64>]) -> Vec<Result<u64, FieldError>> {
        self.count += points.len();
        let field = self.field;
        points.iter().map(|p| (self.f)(field, p)).collect()
    }

    fn count(&self) -> usize {
        self.count
    }
}

impl<F> MultiPrimeProbe for FieldFnProbe<F>
where
    F: FnMut(PrimeField, &[u64]) -> Result<u64, FieldError>,
{
    fn set_field(&mut self, field: PrimeField) -> Result<(), FieldError> {
        self.field = field;
        Ok(())
    }
}
