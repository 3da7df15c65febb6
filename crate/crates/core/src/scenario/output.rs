//! RFC 4180 CSV and `key: value` summary emission.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// 17-significant-digit float formatting used in every CSV cell.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a numeric CSV (UTF-8, CRLF line endings, `.` decimal separator).
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(header.join(",").as_bytes());
    out.extend_from_slice(b"\r\n");
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let line: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.extend_from_slice(line.join(",").as_bytes());
        out.extend_from_slice(b"\r\n");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes fixed `key: value` lines for machine parsing.
pub fn write_summary(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut out = Vec::new();
    for (key, value) in entries {
        writeln!(out, "{key}: {value}")?;
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads one value back out of a summary file.
pub fn read_summary_value(path: &Path, key: &str) -> Result<Option<String>> {
    let text = std::fs::read_to_string(path)?;
    for line in text.lines() {
        if let Some((k, v)) = line.split_once(':') {
            if k.trim() == key {
                return Ok(Some(v.trim().to_string()));
            }
        }
    }
    Ok(None)
}
