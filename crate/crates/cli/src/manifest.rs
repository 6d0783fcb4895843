//! Append-only run manifests.
//!
//! Every run that writes artifacts appends one JSON line describing the
//! command, its parameters, a digest of its configuration and the files it
//! produced.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use plap_core::io::SCHEMA_VERSION;
use plap_core::{NonlinearitySpec, ProblemParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub arguments: Vec<String>,
    pub params: Option<ProblemParams>,
    pub nonlinearity: Option<NonlinearitySpec>,
    /// SHA-256 of the canonical JSON of the run configuration.
    pub config_digest: String,
    pub config: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub wall_time_seconds: f64,
    pub version: String,
}

/// Hex SHA-256 of the compact JSON serialisation of `config`. `serde_json`
/// keeps object keys sorted, so equal configurations give equal digests.
pub fn config_digest(config: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

impl RunManifest {
    pub fn new(
        command: &str,
        params: Option<ProblemParams>,
        nonlinearity: Option<NonlinearitySpec>,
        config: serde_json::Value,
        outputs: Vec<PathBuf>,
        wall_time_seconds: f64,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            params,
            nonlinearity,
            config_digest: config_digest(&config),
            config,
            outputs,
            wall_time_seconds,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Where the manifest goes: the explicit path, or `manifest.jsonl` in the
    /// directory of the first output.
    pub fn location(explicit: Option<&Path>, outputs: &[PathBuf]) -> Option<PathBuf> {
        if let Some(path) = explicit {
            return Some(path.to_path_buf());
        }
        let first = outputs.first()?;
        let dir = first
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        Some(dir.join(MANIFEST_FILE))
    }

    /// Appends this manifest as one line.
    pub fn append(&self, path: &Path) -> std::io::Result<()> {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        let line = serde_json::to_string(self).map_err(std::io::Error::other)?;
        writeln!(file, "{line}")
    }
}

/// Reads every manifest line of `path`.
#[cfg(test)]
pub fn read_manifests(path: &Path) -> std::io::Result<Vec<RunManifest>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(std::io::Error::other))
        .collect()
}
