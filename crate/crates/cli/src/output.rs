//! Long-format CSV emission.
//!
//! Numbers use Rust's shortest round-trip formatting, lines end in `\n`,
//! and `#` comment lines precede a single header row carrying units.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::manifest::FileRecord;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// One CSV table being assembled in memory.
pub struct CsvTable {
    text: String,
    rows: usize,
}

impl CsvTable {
    pub fn new(comments: &[String], header: &[String]) -> Self {
        let mut text = String::new();
        for c in comments {
            for line in c.lines() {
                text.push_str("# ");
                text.push_str(line);
                text.push('\n');
            }
        }
        text.push_str(&header.join(","));
        text.push('\n');
        CsvTable { text, rows: 0 }
    }

    pub fn row(&mut self, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            write!(self.text, "{v:?}").expect("writing to a String");
        }
        self.text.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Writes the table and returns its manifest record (path relative to
    /// `dir`).
    pub fn write(&self, dir: &Path, file_name: &str) -> std::io::Result<FileRecord> {
        let bytes = self.text.as_bytes();
        std::fs::write(dir.join(file_name), bytes)?;
        Ok(FileRecord {
            path: file_name.to_string(),
            sha256: sha256_hex(bytes),
            rows: self.rows,
            bytes: bytes.len(),
        })
    }
}
