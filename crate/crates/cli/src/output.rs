// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pmme_core::ComplexMatrix;

use crate::error::{CliError, Result};

/// 17 significant digits in scientific notation, independent of locale.
/// Negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("({},{})", fmt_f64(z.re), fmt_f64(z.im))
}

/// One row per line, entries as `(re,im)` separated by spaces.
pub fn fmt_matrix(m: &ComplexMatrix) -> String {
    m.rows()
        .into_iter()
        .map(|row| row.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let fail = |source: std::io::Error| CliError::Output { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(fail)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// CSV with a header row, `\n` line endings and preformatted fields.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for r in &self.rows {
            w.write_record(r).expect("writing to memory");
        }
        w.into_inner().expect("flushing to memory")
    }

    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        write_atomic(path, &self.to_bytes())?;
        Ok(path.to_path_buf())
    }
}
