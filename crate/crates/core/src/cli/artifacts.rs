//! JSON artifact envelopes with content hashes and cache-hit detection.
//! Writes are deterministic: identical inputs produce identical bytes, and a
//! rerun that would rewrite identical bytes is reported as a cache hit.

use super::config::hex_sha256;
use crate::error::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub config_hash: String,
    pub seed: u64,
    pub content_hash: String,
    pub payload: T,
}

/// Serialize an artifact; returns true when the file already held exactly
/// these bytes (cache hit, file left untouched).
pub fn write_artifact<T: Serialize>(
    path: &Path,
    config_hash: &str,
    seed: u64,
    payload: &T,
) -> Result<bool> {
    let payload_json = serde_json::to_string(payload).expect("payload serializes");
    let artifact = Artifact {
        config_hash: config_hash.to_string(),
        seed,
        content_hash: hex_sha256(payload_json.as_bytes()),
        payload,
    };
    let mut bytes = serde_json::to_vec_pretty(&artifact).expect("artifact serializes");
    bytes.push(b'\n');
    if let Ok(existing) = std::fs::read(path) {
        if existing == bytes {
            return Ok(true);
        }
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(false)
}

/// Load an artifact and verify it was produced under the same config hash.
pub fn read_artifact<T: DeserializeOwned>(path: &Path, config_hash: &str) -> Result<Artifact<T>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read artifact {path:?}: {e}")))?;
    let artifact: Artifact<T> = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("malformed artifact {path:?}: {e}")))?;
    if artifact.config_hash != config_hash {
        return Err(Error::Mismatch(format!(
            "artifact {path:?} was built under config hash {} but the current config hashes to {}",
            artifact.config_hash, config_hash
        )));
    }
    Ok(artifact)
}
