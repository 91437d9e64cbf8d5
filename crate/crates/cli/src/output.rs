// Reading inputs and writing artifacts. Every number leaves through
// `format_f64`, so identical runs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use heat_control::serde_num::format_f64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Failure, EXIT_NUMERICS, EXIT_PARSE};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(|e| Failure::new(EXIT_PARSE, e))?;
    serde_json::from_str(&text)
        .with_context(|| format!("cannot parse {}", path.display()))
        .map_err(|e| Failure::new(EXIT_PARSE, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize infallibly");
    s.push('\n');
    s
}

fn io_failure(e: impl Into<anyhow::Error>, path: &Path) -> Failure {
    Failure::new(EXIT_NUMERICS, e.into().context(format!("cannot write {}", path.display())))
}

pub fn resolve(out_dir: &Path, name: impl AsRef<Path>) -> Result<PathBuf, Failure> {
    fs::create_dir_all(out_dir).map_err(|e| io_failure(e, out_dir))?;
    Ok(out_dir.join(name))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_failure(e, dir))?;
    }
    fs::write(path, to_json(value)).map_err(|e| io_failure(e, path))
}

/// Write a CSV with a header row; every cell is a number.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_failure(e, path))?;
    w.write_record(header).map_err(|e| io_failure(e, path))?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_f64(x))).map_err(|e| io_failure(e, path))?;
    }
    w.flush().map_err(|e| io_failure(e, path))
}
