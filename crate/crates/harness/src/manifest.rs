//! Run manifest: config hash, code version, wall-clock, per-monitor
//! verdicts, and the artifact list with checksums.

use crate::config::fnv1a;
use crate::error::Result;
use nssl_estimates::MonitorReport;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_hash: u64,
    pub code_version: String,
    pub wall_clock_s: f64,
    pub verdicts: Vec<(String, String)>,
    pub artifacts: Vec<(PathBuf, u64)>,
}

impl RunManifest {
    pub fn new(config_hash: u64, wall_clock_s: f64, reports: &[MonitorReport]) -> Self {
        RunManifest {
            config_hash,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_s,
            verdicts: reports
                .iter()
                .map(|r| (r.id.clone(), r.verdict.as_str().to_string()))
                .collect(),
            artifacts: Vec::new(),
        }
    }

    /// Register a written artifact, checksumming its current on-disk bytes.
    pub fn add_artifact(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.artifacts.push((path.to_path_buf(), fnv1a(&bytes)));
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "config_hash: {:016x}", self.config_hash);
        let _ = writeln!(out, "code_version: {}", self.code_version);
        let _ = writeln!(out, "wall_clock_s: {}", self.wall_clock_s);
        for (id, verdict) in &self.verdicts {
            let _ = writeln!(out, "verdict: {id} = {verdict}");
        }
        for (path, checksum) in &self.artifacts {
            let _ = writeln!(out, "artifact: {} {:016x}", path.display(), checksum);
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    /// Re-read every artifact and confirm the stored checksums.
    pub fn verify_artifacts(&self) -> Result<bool> {
        for (path, stored) in &self.artifacts {
            let bytes = std::fs::read(path)?;
            if fnv1a(&bytes) != *stored {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
