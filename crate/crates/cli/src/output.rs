//! Rendering helpers shared by the subcommands. CSV and JSON output must be
//! byte-identical across runs for identical flags, so every number goes
//! through a fixed-precision formatter and JSON objects keep sorted keys.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::AppError;

/// 17 significant digits round-trip every f64 exactly; the decimal separator
/// is always `.` regardless of locale.
pub fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_document(header: &str, lines: impl IntoIterator<Item = String>) -> String {
    let mut document = String::from(header);
    document.push('\n');
    for line in lines {
        document.push_str(&line);
        document.push('\n');
    }
    document
}

pub fn json_document(meta: serde_json::Value, rows: Vec<serde_json::Value>) -> String {
    let document = serde_json::json!({ "meta": meta, "rows": rows });
    let mut text =
        serde_json::to_string_pretty(&document).expect("in-memory serialization cannot fail");
    text.push('\n');
    text
}

pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|cell| cell.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut document = String::new();
    push_row(&mut document, &widths, header.iter().copied());
    for row in rows {
        push_row(&mut document, &widths, row.iter().map(String::as_str));
    }
    document
}

fn push_row<'a>(document: &mut String, widths: &[usize], cells: impl Iterator<Item = &'a str>) {
    let mut line = String::new();
    for (i, cell) in cells.enumerate() {
        if i > 0 {
            line.push_str("  ");
        }
        line.push_str(&format!("{cell:<width$}", width = widths[i]));
    }
    document.push_str(line.trim_end());
    document.push('\n');
}

pub fn write_output(out: Option<&Path>, content: &str) -> Result<(), AppError> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|error| AppError::Io(path.to_path_buf(), error))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|error| AppError::Io(PathBuf::from("<stdout>"), error))
        }
    }
}
