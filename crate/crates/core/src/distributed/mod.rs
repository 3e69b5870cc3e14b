//! Master/worker probe distribution over TCP.
//!
//! The master runs the usual driver against a [`MasterSampler`], which hands
//! probe bunches to connected workers and evaluates whatever is left over
//! itself. Values are pure functions of (prime, point), so results match a
//! local run exactly no matter which process computed them.

mod master;
mod wire;
mod worker;

pub use master::{run_master, MasterOptions, MasterSampler};
pub use wire::{read_message, write_message, WireMessage, MAX_FRAME, PROTOCOL_VERSION};
pub use worker::{run_worker, WorkerOptions, WorkerStats};

use thiserror::Error;

use crate::driver::DriverError;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("truncated frame")]
    Truncated,
    #[error("bad frame length {0}")]
    BadLength(u32),
    #[error("unknown message tag {0}")]
    UnknownTag(u8),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("protocol version {got}, expected {expected}")]
    Version { expected: u32, got: u32 },
    #[error("unexpected message: {0}")]
    Unexpected(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum DistError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error("could not reach {addr} after {attempts} attempts")]
    Connect { addr: String, attempts: u32 },
    #[error("worker configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
