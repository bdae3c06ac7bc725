//! Run manifests: what each stage read, wrote, kept and dropped.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::atomic_write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub input_records: usize,
    pub output_records: usize,
    /// Dropped records per reason.
    pub rejections: BTreeMap<String, usize>,
}

impl StageReport {
    pub fn new(name: &str, input_records: usize, output_records: usize) -> Self {
        Self {
            name: name.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            input_records,
            output_records,
            rejections: BTreeMap::new(),
        }
    }

    pub fn inputs(mut self, paths: &[&Path]) -> Self {
        self.inputs = paths.iter().map(|p| crate::io::display(p)).collect();
        self
    }

    pub fn outputs(mut self, paths: &[&Path]) -> Self {
        self.outputs = paths.iter().map(|p| crate::io::display(p)).collect();
        self
    }

    pub fn rejections<I: IntoIterator<Item = String>>(mut self, reasons: I) -> Self {
        for r in reasons {
            *self.rejections.entry(r).or_default() += 1;
        }
        self
    }
}

/// Deterministic by construction: no timestamps or host details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRunManifest {
    pub tool: String,
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the effective settings as canonical JSON.
    pub config_hash: String,
    pub settings: serde_json::Value,
    pub stages: Vec<StageReport>,
}

impl PipelineRunManifest {
    pub fn new(command: &str, seed: u64, settings: serde_json::Value, stages: Vec<StageReport>) -> Self {
        Self {
            tool: format!("knowref {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            seed,
            config_hash: config_hash(&settings),
            settings,
            stages,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        atomic_write(path, text.as_bytes())
    }
}

pub fn config_hash(settings: &serde_json::Value) -> String {
    // serde_json maps are ordered by key, so this encoding is canonical.
    let digest = Sha256::digest(settings.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
