//! Run manifests: every invocation that writes outputs also records what
//! produced them — the subcommand, its arguments, SHA-256 digests of the
//! input files, the seeds involved, the tool version, and the wall time.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = std::fmt::Write::write_fmt(&mut out, format_args!("{b:02x}"));
    }
    out
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct ManifestDoc {
    command: String,
    argv: Vec<String>,
    inputs: Vec<InputDigest>,
    seeds: Vec<u64>,
    tool_version: String,
    wall_time_ms: u128,
}

pub struct RunManifest {
    command: String,
    started: Instant,
    inputs: Vec<InputDigest>,
    seeds: Vec<u64>,
}

impl RunManifest {
    pub fn start(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            started: Instant::now(),
            inputs: Vec::new(),
            seeds: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
        });
        Ok(())
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    /// Writes `<primary output stem>.manifest.json` next to the output.
    pub fn write_for(&self, primary_out: &Path) -> Result<()> {
        let stem = primary_out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string());
        let path = primary_out.with_file_name(format!("{stem}.manifest.json"));
        self.write_to(&path)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let doc = ManifestDoc {
            command: self.command.clone(),
            argv: std::env::args().skip(1).collect(),
            inputs: self.inputs.iter().map(|i| InputDigest {
                path: i.path.clone(),
                sha256: i.sha256.clone(),
            }).collect(),
            seeds: self.seeds.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: self.started.elapsed().as_millis(),
        };
        let json = serde_json::to_string_pretty(&doc)?;
        fs::write(path, json + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

/// Hex SHA-256 of a byte buffer (used for generated outputs).
pub fn digest_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}
