use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Result;

/// Everything that determines a command's output. Its digest is embedded in
/// every file written, so replays with different inputs or settings are
/// detectable.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    /// Input files as given, with the SHA-256 of their contents.
    pub inputs: Vec<(String, String)>,
    /// Command settings (family, sign region, chain, prior, …) as JSON.
    pub settings: BTreeMap<String, serde_json::Value>,
    /// Where outputs go. Not part of the digest: the same run written to two
    /// directories produces identical files.
    #[serde(skip)]
    pub output: PathBuf,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, output: &Path) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            inputs: Vec::new(),
            settings: BTreeMap::new(),
            output: output.to_path_buf(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs.push((path.display().to_string(), hex::encode(Sha256::digest(&bytes))));
        Ok(())
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        self.settings
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable setting"));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// Hex SHA-256 of the manifest's canonical JSON.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// `#`-comment lines heading every delimited output.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("smcsn {} {}", self.command, self.version),
            format!("manifest sha256:{}", self.digest()),
            format!("seed {}", self.seed),
            format!("settings {}", serde_json::to_string(&self.settings).expect("settings serialize")),
        ]
    }
}
