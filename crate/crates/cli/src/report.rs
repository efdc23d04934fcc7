//! CSV rows and JSON manifests written next to every output.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use edgelayout::CostBreakdown;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub args: serde_json::Value,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &'static str, seed: u64, args: serde_json::Value) -> Self {
        Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config_hash: None,
            args,
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub fn write_manifest(out: &Path, manifest: &Manifest) -> Result<()> {
    let path = manifest_path(out);
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// One optimizer result.
#[derive(Debug, Serialize)]
pub struct CostRow {
    pub instance: String,
    pub layout: String,
    pub algo: String,
    pub seed: u64,
    pub rounds: Option<usize>,
    pub iterations: Option<usize>,
    pub c_u: f64,
    pub c_p: f64,
    pub c_t: f64,
    pub c_m: f64,
    pub total: f64,
    pub wall_ms: f64,
}

impl CostRow {
    pub fn set_cost(&mut self, b: &CostBreakdown) {
        self.c_u = b.c_u;
        self.c_p = b.c_p;
        self.c_t = b.c_t;
        self.c_m = b.c_m;
        self.total = b.total;
    }
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
