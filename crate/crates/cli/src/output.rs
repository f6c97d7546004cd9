//! CSV and JSON writers that record what they wrote for the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::hex;
use crate::error::Result;

/// Full-precision scientific notation; `{:e}` prints the shortest form that round-trips.
pub fn fmt_f(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    /// Data rows, excluding the header; 1 for JSON documents.
    pub rows: usize,
    pub sha256: String,
}

/// A run directory being filled.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn put(&mut self, name: &str, bytes: Vec<u8>, rows: usize) -> Result<()> {
        fs::write(self.root.join(name), &bytes)?;
        self.files.push(OutputFile { name: name.to_string(), rows, sha256: hex(&Sha256::digest(&bytes)) });
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.put(name, bytes, rows.len())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.put(name, bytes, 1)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        self.put(name, text.as_bytes().to_vec(), 1)
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    pub fn into_files(self) -> Vec<OutputFile> {
        self.files
    }
}
