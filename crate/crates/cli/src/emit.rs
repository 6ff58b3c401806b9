//! CSV and JSON emission with a fixed, diffable format: header row, comma
//! separators, LF line endings, 12 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// Fixed 12-significant-digit scientific formatting; NaN prints as `nan`.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// 10·log10(v); presentation-layer dB companion of a linear MSE column.
pub fn to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

pub struct CsvWriter {
    inner: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut inner = BufWriter::new(file);
        inner.write_all(header.join(",").as_bytes())?;
        inner.write_all(b"\n")?;
        Ok(Self { inner })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        self.inner.write_all(fields.join(",").as_bytes())?;
        self.inner.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut raw = serde_json::to_string_pretty(value).context("serialize JSON")?;
    raw.push('\n');
    std::fs::write(path, raw).with_context(|| format!("cannot write {}", path.display()))
}
