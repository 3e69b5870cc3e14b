use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DriverError, FunctionReport};
use crate::factorscan::FactorScanResult;
use crate::numtheory::prime_sequence;
use crate::polyinterp::{Monomial, SparsePoly};
use crate::ratinterp::{RationalFunctionFF, Structure};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Image of one function modulo one prime of the built-in sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub prime_index: usize,
    pub num: Vec<(Monomial, u64)>,
    pub den: Vec<(Monomial, u64)>,
}

impl ImageRecord {
    pub fn new(prime_index: usize, r: &RationalFunctionFF) -> Self {
        let terms = |p: &SparsePoly| p.terms().iter().map(|(m, &c)| (m.clone(), c)).collect();
        Self {
            prime_index,
            num: terms(&r.num),
            den: terms(&r.den),
        }
    }

    pub fn to_ff(&self, n_vars: usize) -> Result<(RationalFunctionFF, u64), DriverError> {
        let f = prime_sequence(self.prime_index).map_err(|e| DriverError::Checkpoint(e.to_string()))?;
        let poly = |t: &[(Monomial, u64)]| SparsePoly::from_terms(f, n_vars, t.iter().cloned());
        let r = RationalFunctionFF::new(poly(&self.num), poly(&self.den))
            .map_err(|e| DriverError::Checkpoint(e.to_string()))?;
        Ok((r, f.p()))
    }
}

/// Per-function progress: scan result, skeleton and residues so far.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionCheckpoint {
    pub scan: Option<FactorScanResult>,
    pub structure: Option<Structure>,
    pub images: Vec<ImageRecord>,
    pub next_prime: usize,
    pub done: bool,
    pub report: FunctionReport,
}

/// Versioned JSON snapshot of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub fingerprint: Option<u64>,
    pub n_vars: usize,
    pub seed: u64,
    pub functions: Vec<FunctionCheckpoint>,
}

impl Checkpoint {
    pub fn new(fingerprint: Option<u64>, n_vars: usize, n_functions: usize, seed: u64) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            fingerprint,
            n_vars,
            seed,
            functions: vec![FunctionCheckpoint::default(); n_functions],
        }
    }

    /// Writes through a temporary file so a crash never leaves half a snapshot.
    pub fn save(&self, path: &Path) -> Result<(), DriverError> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(self).map_err(|e| DriverError::Checkpoint(e.to_string()))?;
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, DriverError> {
        let text = fs::read_to_string(path)?;
        let c: Self = serde_json::from_str(&text).map_err(|e| DriverError::Checkpoint(e.to_string()))?;
        if c.version != CHECKPOINT_VERSION {
            return Err(DriverError::Checkpoint(format!(
                "snapshot version {} (expected {CHECKPOINT_VERSION})",
                c.version
            )));
        }
        Ok(c)
    }

    /// Checks that the snapshot belongs to this black box.
    pub fn check(&self, fingerprint: Option<u64>, n_vars: usize, n_functions: usize) -> Result<(), DriverError> {
        if self.n_vars != n_vars || self.functions.len() != n_functions || self.fingerprint != fingerprint {
            return Err(DriverError::Checkpoint("snapshot was written for different functions".into()));
        }
        Ok(())
    }
}
