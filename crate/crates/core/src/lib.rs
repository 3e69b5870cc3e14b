//! Reconstruction of multivariate rational functions from black-box
//! evaluations over prime fields.
//!
//! The pipeline interpolates over 63-bit prime fields (racing Newton against
//! Ben-Or/Tiwari inside a Zippel layer, with the hybrid racer for rational
//! functions), optionally scans for univariate factors first, and lifts the
//! result to exact rational coefficients.

pub mod cli;
pub mod distributed;
pub mod driver;
pub mod factorscan;
pub mod numtheory;
pub mod parser;
pub mod polyinterp;
pub mod ratinterp;
