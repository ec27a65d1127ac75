//! Command-line front end of `isostokes`: problem specs in, JSON reports and CSV plot
//! tables out.

pub mod commands;
pub mod report;
pub mod spec;

use serde::Serialize;
use std::path::{Path, PathBuf};

/// Write `<dir>/<command>.json` and the extra tables; returns the written paths.
pub fn write_outputs<T: Serialize>(
    dir: &Path,
    report: &report::Report<T>,
    tables: &[(&str, Vec<u8>)],
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join(format!("{}.json", report.command));
    let mut json = serde_json::to_vec_pretty(report).map_err(std::io::Error::other)?;
    json.push(b'\n');
    std::fs::write(&path, json)?;
    written.push(path);
    for (name, bytes) in tables {
        let path = dir.join(name);
        std::fs::write(&path, bytes)?;
        written.push(path);
    }
    Ok(written)
}
