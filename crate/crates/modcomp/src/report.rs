//! CSV tables, plot-ready TSV files and the run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::RunError;

/// Round-trip float formatting: 17 significant digits.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// One CSV file with a fixed header.
pub struct Table {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl Table {
    pub fn create(path: PathBuf, header: &[&str]) -> Result<Self, RunError> {
        let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
        writer.write_record(header)?;
        Ok(Self { path, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), RunError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf, RunError> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

/// Two or more tab-separated columns with a `#` header line.
pub fn write_tsv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf, RunError> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# {}", header.join("\t"))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| float(*v)).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    out.flush()?;
    Ok(path.to_path_buf())
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub name: &'a str,
    pub kind: &'a str,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub passed: bool,
    pub checks: &'a [CheckOutcome],
    pub files: Vec<String>,
    pub config: &'a crate::config::ExperimentConfig,
}

/// Named pass/fail result echoed to the manifest and the terminal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn write_manifest(path: &Path, manifest: &Manifest<'_>) -> Result<PathBuf, RunError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, manifest)?;
    writeln!(out)?;
    out.flush()?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(f64::INFINITY), "inf");
        assert_eq!(float(0.5), "5.0000000000000000e-1");
    }
}
