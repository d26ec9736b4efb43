use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Sidecar describing how an output file was produced.
///
/// Re-running `qkd3` with `argv` reproduces the output byte for byte; the
/// checksum lets a consumer confirm that.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub argv: Vec<String>,
    pub output: String,
    pub output_sha256: String,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        params: serde_json::Value,
        seeds: Vec<u64>,
        argv: Vec<String>,
        output_path: &Path,
        output: &[u8],
    ) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            params,
            seeds,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            argv,
            output: output_path.display().to_string(),
            output_sha256: sha256_hex(output),
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write_beside(&self, output: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(Self::path_for(output), text)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
