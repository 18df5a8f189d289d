//! Run manifests for reproducibility: the resolved config hash, hashes of
//! every input file, and the tool version.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::errors::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub input_hashes: BTreeMap<String, String>,
}

fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex(&hasher.finalize())
}

pub fn hash_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path)
        .map_err(|err| CliError::Input(format!("{}: {err}", path.display())))?;
    Ok(hash_bytes(&bytes))
}

/// Writes `manifest.json` into `out_dir`, hashing the resolved config and
/// the listed input files.
pub fn write_manifest<C: Serialize>(
    out_dir: &Path,
    command: &str,
    config: &C,
    inputs: &[&Path],
) -> CliResult<()> {
    let config_json = serde_json::to_string(config)
        .map_err(|err| CliError::Config(format!("config serialization: {err}")))?;
    let mut input_hashes = BTreeMap::new();
    for path in inputs {
        input_hashes.insert(path.display().to_string(), hash_file(path)?);
    }
    let manifest = Manifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: hash_bytes(config_json.as_bytes()),
        input_hashes,
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|err| CliError::Config(format!("manifest serialization: {err}")))?;
    std::fs::write(out_dir.join("manifest.json"), text)
        .map_err(|err| CliError::Input(format!("writing manifest: {err}")))?;
    Ok(())
}

pub fn ensure_out_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path)
        .map_err(|err| CliError::Input(format!("creating {}: {err}", path.display())))
}
