//! Append-only report files keyed by a hash of the command and its configuration.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::failure::Failure;

/// One line of a report file.
#[derive(Debug, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    pub config: RunConfig,
    pub passed: bool,
    pub summary: String,
    pub result: serde_json::Value,
}

#[derive(Serialize)]
struct Key<'a> {
    command: &'a str,
    config: &'a RunConfig,
}

/// Hex SHA-256 of the command and configuration, ignoring the output directory.
pub fn config_hash(command: &str, config: &RunConfig) -> Result<String, Failure> {
    let mut keyed = config.clone();
    keyed.output_path = PathBuf::new();
    let bytes = serde_json::to_vec(&Key { command, config: &keyed })?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

pub struct ReportFile {
    pub path: PathBuf,
}

impl ReportFile {
    pub fn locate(command: &str, config: &RunConfig) -> Result<Self, Failure> {
        let hash = config_hash(command, config)?;
        let path = config.output_path.join(format!("{command}-{}.jsonl", &hash[..16]));
        Ok(ReportFile { path })
    }

    pub fn exists(&self) -> bool {
        self.path.exists()
    }

    /// Sibling file for auxiliary output, e.g. `<stem>.operator.json`.
    pub fn sibling(&self, suffix: &str) -> PathBuf {
        let stem = self.path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        self.path.with_file_name(format!("{stem}.{suffix}"))
    }

    /// The most recent record in the file.
    pub fn last(&self) -> Result<Record, Failure> {
        let text = fs::read_to_string(&self.path)?;
        let line = text
            .lines()
            .rev()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| Failure::Usage(format!("{} is empty", self.path.display())))?;
        serde_json::from_str(line).map_err(|e| Failure::Usage(format!("{}: {e}", self.path.display())))
    }

    pub fn append(&self, record: &Record) -> Result<(), Failure> {
        ensure_dir(self.path.parent())?;
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.write_all(line.as_bytes())?;
        Ok(())
    }
}

pub fn ensure_dir(dir: Option<&Path>) -> Result<(), Failure> {
    match dir {
        Some(d) if !d.as_os_str().is_empty() => Ok(fs::create_dir_all(d)?),
        _ => Ok(()),
    }
}
