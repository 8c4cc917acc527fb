//! Run manifest: config echo, artifact version, wall time and checksums of
//! every emitted data file.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub artifact_version: String,
    pub scenario: String,
    pub status: String,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputRecord>,
    pub config: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

impl Manifest {
    pub fn new(scenario: &str, config: Value) -> Self {
        Self {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: scenario.to_string(),
            status: "ok".to_string(),
            wall_time_s: 0.0,
            outputs: Vec::new(),
            config,
        }
    }

    pub fn record(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(OutputRecord {
            path: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.to_string_lossy().into_owned()),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
