//! Optional TOML config whose keys mirror the long flags. A flag given on
//! the command line wins over the file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

pub const SEED_ENV: &str = "KNOWREF_SEED";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub style: Option<String>,
    pub min_tokens: Option<usize>,
    pub max_tokens: Option<usize>,
    pub lexicon: Option<PathBuf>,
    pub tagger_model: Option<PathBuf>,
    pub connectives: Option<Vec<String>>,
    pub neutralize: Option<bool>,
    pub order: Option<usize>,
    pub k: Option<f64>,
    pub epochs: Option<usize>,
    pub host: Option<String>,
    pub port: Option<u16>,
    pub threshold: Option<u32>,
    pub annotators: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flag, then config file, then `KNOWREF_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, config: &FileConfig) -> Result<u64> {
    if let Some(s) = flag.or(config.seed) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}=`{v}` is not an unsigned integer")),
        Err(_) => Ok(0),
    }
}
