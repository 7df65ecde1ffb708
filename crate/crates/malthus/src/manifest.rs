use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of one run, written next to its output as `<out>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// Every setting the outputs depend on, as `key -> value`.
    pub config: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<OutputDigest>,
}

pub fn now_unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>, seed: Option<u64>, started_unix_ms: u128) -> Self {
        Self {
            command: command.to_owned(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            config,
            seed,
            started_unix_ms,
            finished_unix_ms: started_unix_ms,
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, path: &Path, contents: &[u8]) {
        self.outputs.push(OutputDigest { path: path.display().to_string(), sha256: sha256_hex(contents) });
    }

    /// Stamps the finish time and writes the manifest beside `out`.
    pub fn write_beside(mut self, out: &Path) -> CliResult<PathBuf> {
        self.finished_unix_ms = now_unix_ms();
        let path = manifest_path(out);
        let json = serde_json::to_string_pretty(&self).expect("manifest serialises");
        std::fs::write(&path, json + "\n").map_err(CliError::io(&path))?;
        Ok(path)
    }
}
