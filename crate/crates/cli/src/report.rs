use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest as _, Sha256};

use crate::CliError;

pub const REPORT_SCHEMA: &str = "plap-report/1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(64);
    for b in Sha256::digest(bytes).iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Digest {
    pub file: String,
    pub sha256: String,
}

/// Inputs and outputs of one run. Nothing here depends on the clock or on
/// the thread count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub code_version: &'static str,
    pub seed: u64,
    pub outputs: Vec<Digest>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckRow {
    /// `value ≤ bound`, margin `bound - value`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> CheckRow {
        CheckRow { name: name.into(), value, bound, margin: bound - value, pass: value <= bound }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> CheckRow {
        let value = if pass { 1.0 } else { 0.0 };
        CheckRow { name: name.into(), value, bound: 1.0, margin: value - 1.0, pass }
    }
}

/// Writes files into the output directory and remembers their digests.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    written: Vec<Digest>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Outputs, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        Ok(Outputs { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.written.push(Digest { file: name.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    }

    pub fn digests(&self) -> Vec<Digest> {
        self.written.clone()
    }

    /// Serialises the report last, after the digests of everything else.
    pub fn write_report<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), CliError> {
        let text = toml::to_string(report).map_err(|e| CliError::Runtime(format!("report serialisation: {e}")))?;
        self.write(name, &text)
    }
}
