//! Result records: one JSON object per line, appended to the output file.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub experiment: String,
    pub check: String,
    pub inputs_sha256: String,
    pub seed: u64,
    pub n: usize,
    pub samples: usize,
    /// `c/√samples + c′/N` for this run.
    pub envelope: f64,
    /// Named numeric outputs of the check. Keys sort, so the line is stable.
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    pub failures: Vec<String>,
    pub wall_time_s: f64,
}

impl ResultRecord {
    /// Everything except the wall time, which is the only field allowed to
    /// differ between reruns.
    pub fn numeric_fingerprint(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_s = 0.0;
        serde_json::to_string(&copy).expect("records always serialize")
    }
}

/// Lower-case hex SHA-256 of the given parts, each followed by a newline.
pub fn inputs_hash(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// The single writer appending records to a JSON-lines file.
pub struct RecordWriter {
    file: File,
}

impl RecordWriter {
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path).with_context(|| path.display().to_string())?;
        Ok(RecordWriter { file })
    }

    pub fn append(&mut self, record: &ResultRecord) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>> {
    let file = File::open(path).with_context(|| path.display().to_string())?;
    BufReader::new(file)
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(i, l)| {
            let l = l?;
            serde_json::from_str(&l).with_context(|| format!("{}: line {}", path.display(), i + 1))
        })
        .collect()
}
