use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes a header and rows as CSV to `path`, or to stdout.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let res = w.write_record(header).and_then(|_| rows.iter().try_for_each(|r| w.write_record(r))).and_then(|_| w.flush().map_err(Into::into));
        res.map_err(|e| CliError::Io(format!("csv: {e}")))?;
    }
    match path {
        Some(p) => {
            ensure_parent(p)?;
            fs::write(p, &buf).map_err(|e| io_err(p, e))
        }
        None => io::stdout().write_all(&buf).map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("json: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            ensure_parent(p)?;
            fs::write(p, text).map_err(|e| io_err(p, e))
        }
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

/// `results.csv` -> `results.json`.
pub fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn ensure_parent(p: &Path) -> Result<(), CliError> {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => fs::create_dir_all(d).map_err(|e| io_err(d, e)),
        _ => Ok(()),
    }
}

pub fn ensure_dir(p: &Path) -> Result<(), CliError> {
    fs::create_dir_all(p).map_err(|e| io_err(p, e))
}

/// Shortest round-trip form, in exponent notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}
