//! Reconstruction driver: the black-box contract, bunched probe evaluation
//! over a thread pool, the multi-prime loop and checkpoints.

mod blackbox;
mod checkpoint;
mod gen;
mod run;
mod sampler;

pub use blackbox::{BlackBox, CountingBlackBox, ExpressionBlackBox, FnBlackBox};
pub use checkpoint::{Checkpoint, FunctionCheckpoint, ImageRecord, CHECKPOINT_VERSION};
pub use gen::{gen_dense_poly, monomial_count, PolyForm, GEN_VARS};
pub use run::{reconstruct, reconstruct_with, FunctionReport, RunReport};
pub(crate) use sampler::bunches;
pub use sampler::{FunctionProbe, LocalSampler, Sampler};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numtheory::PRIMES;
use crate::polyinterp::RaceMode;

/// Bunch sizes the evaluators are tuned for.
pub const BUNCH_SIZES: [usize; 8] = [1, 2, 4, 8, 16, 32, 64, 128];

/// Size of the next bunch given `queued` outstanding probes:
/// `min(2^p, b_max)` with `p = max(0, floor(log2(queued / threads)))`.
pub fn compute_bunch_size(queued: usize, threads: usize, b_max: usize) -> usize {
    let t = threads.max(1);
    let mut p = 0;
    // floor(log2(q / t)) without floating point: largest p with t * 2^p <= q
    while (t as u128) << (p + 1) <= queued as u128 {
        p += 1;
    }
    (1usize << p.min(63)).min(b_max.max(1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_threads: usize,
    /// A power of two in `1..=128`.
    pub max_bunch_size: usize,
    pub eta: usize,
    pub seed: u64,
    pub enable_factor_scan: bool,
    pub enable_shift_scan: bool,
    pub max_primes: usize,
    pub race_mode: RaceMode,
    pub max_retries: usize,
    /// Snapshot written after every prime.
    pub save_state: Option<PathBuf>,
    /// Snapshot to continue from.
    pub resume: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_threads: 1,
            max_bunch_size: 1,
            eta: 1,
            seed: 1,
            enable_factor_scan: true,
            enable_shift_scan: true,
            max_primes: PRIMES.len(),
            race_mode: RaceMode::Race,
            max_retries: crate::ratinterp::MAX_RETRIES,
            save_state: None,
            resume: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), DriverError> {
        if !BUNCH_SIZES.contains(&self.max_bunch_size) {
            return Err(DriverError::Config(format!(
                "bunch size {} is not a power of two up to 128",
                self.max_bunch_size
            )));
        }
        if self.n_threads == 0 {
            return Err(DriverError::Config("at least one thread is needed".into()));
        }
        if self.max_primes == 0 || self.max_primes > PRIMES.len() {
            return Err(DriverError::Config(format!("max_primes must lie in 1..={}", PRIMES.len())));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("function {function} not reconstructed after {primes} primes")]
    Exhausted {
        function: usize,
        primes: usize,
        report: Box<RunReport>,
    },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
