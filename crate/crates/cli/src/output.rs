//! File output helpers.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use homsim_core::montecarlo::CorrelationHistogram;

use crate::error::{CliError, CliResult};

/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a truncated file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| CliError::Compute(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Fixed-precision number for CSV columns.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

pub fn csv_bytes(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Compute(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Compute(e.to_string()))
}

/// `bin_start_ns,bin_end_ns,counts`.
pub fn histogram_csv(hist: &CorrelationHistogram) -> CliResult<Vec<u8>> {
    let rows = (0..hist.n_bins()).map(|i| {
        vec![
            fixed(hist.bin_start(i)),
            fixed(hist.bin_start(i + 1)),
            hist.counts[i].to_string(),
        ]
    });
    csv_bytes(&["bin_start_ns", "bin_end_ns", "counts"], rows)
}

/// Timestamped lines for `run.log`; the only place wall-clock time appears.
#[derive(Debug, Default)]
pub struct RunLog {
    lines: Vec<String>,
}

impl RunLog {
    pub fn line(&mut self, msg: impl AsRef<str>) {
        let now = Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true);
        self.lines.push(format!("{now} {}", msg.as_ref()));
    }

    pub fn bytes(&self) -> Vec<u8> {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s.into_bytes()
    }
}
