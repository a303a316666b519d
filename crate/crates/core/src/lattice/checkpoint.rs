//! JSON trajectory checkpoints.
//!
//! ```text
//! {
//!   "format": "oatbell-lattice-checkpoint",
//!   "version": 1,
//!   "basis_hash": "<sha256 hex of the occupation table>",
//!   "params": { ...BHParams... },
//!   "step": 120,
//!   "time": 6.0,
//!   "amplitudes": [[re, im], ...]
//! }
//! ```

use super::params::BHParams;
use super::system::{LatticeState, LatticeSystem};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

pub const CHECKPOINT_FORMAT: &str = "oatbell-lattice-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub basis_hash: String,
    pub params: BHParams,
    pub step: u64,
    pub time: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

impl Checkpoint {
    /// Snapshot after `step` completed output points, at time `time`.
    pub fn capture(system: &LatticeSystem, state: &LatticeState, step: u64, time: f64) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            basis_hash: system.basis().content_hash(),
            params: *system.params(),
            step,
            time,
            amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if cp.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unknown format {:?}", cp.format)));
        }
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", cp.version)));
        }
        Ok(cp)
    }

    /// Rebuild the state, checking it belongs to `system`.
    pub fn restore(&self, system: &LatticeSystem) -> Result<LatticeState> {
        if &self.params != system.params() {
            return Err(Error::Checkpoint("parameters differ from the running system".into()));
        }
        if self.basis_hash != system.basis().content_hash() {
            return Err(Error::Checkpoint("basis hash mismatch".into()));
        }
        let amps = self
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        LatticeState::new(system.basis().clone(), amps)
    }
}
