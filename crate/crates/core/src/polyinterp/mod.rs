//! Polynomial interpolation over prime fields: Newton, Berlekamp–Massey and
//! Ben-Or/Tiwari raced against each other, and a Zippel layer on top.

mod bm;
mod dense;
mod newton;
mod racer;
mod sparse;
mod vandermonde;
mod zippel;

pub use bm::{bm_to_aux_poly, bm_update, bot_find_degrees, BMState};
pub use dense::DensePolyFF;
pub use newton::NewtonState;
pub use racer::{race_update, RaceMode, RacerState, Winner, DEFAULT_SCAN_LIMIT};
pub use sparse::{Monomial, SparsePoly};
pub use vandermonde::{gauss_solve, solve_shifted_vandermonde, solve_transposed_vandermonde};
pub use zippel::{zippel_interpolate, DegreeBounds, ZippelState};

use crate::numtheory::FieldError;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status<T> {
    Running,
    Done(T),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("point {0} was probed twice")]
    RepeatedPoint(u64),
    #[error("Berlekamp–Massey has not terminated yet")]
    NotTerminated,
    #[error("singular Vandermonde system; the anchor has too small an order")]
    Singular,
    #[error("inconsistent probes: {0}")]
    Inconsistent(String),
    #[error("gave up after {0} failed evaluations")]
    Exhausted(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}
