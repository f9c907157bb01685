//! Run manifests: resolved configuration, input digests and outputs.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Lines of the manifest that depend on the wall clock.
pub const VOLATILE_KEYS: &[&str] = &["started_unix", "wall_clock_ms"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// Resolved configuration in a fixed key order.
    pub config: Vec<(String, String)>,
    /// `(path as given, sha256 hex)`.
    pub inputs: Vec<(String, String)>,
    /// Output file names relative to the output directory.
    pub outputs: Vec<String>,
    pub started_unix: u64,
    pub wall_clock_ms: u128,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn write(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "#manifest v1")?;
        writeln!(w, "command={}", self.command)?;
        writeln!(w, "version={}", self.version)?;
        writeln!(w, "seed={}", self.seed)?;
        for (k, v) in &self.config {
            writeln!(w, "config.{k}={v}")?;
        }
        for (p, d) in &self.inputs {
            writeln!(w, "input={p} sha256={d}")?;
        }
        for o in &self.outputs {
            writeln!(w, "output={o}")?;
        }
        writeln!(w, "started_unix={}", self.started_unix)?;
        writeln!(w, "wall_clock_ms={}", self.wall_clock_ms)?;
        Ok(())
    }
}
