//! Deterministic artifact writers.
//!
//! Every run writes its tables and summaries through this module so that a
//! repeated invocation with the same arguments produces byte-identical
//! files: floats are rendered with Rust's shortest round-trip formatter
//! (stable for a given bit pattern, reparses to the same value), rows are
//! appended in sweep index order by a single collector, line endings are
//! always `\n`, and JSON objects serialise with sorted keys.

use std::fs;
use std::path::Path;

use anyhow::Context;

/// CSV table under construction: a pinned header plus rows of cells.
pub struct Csv {
    header: &'static str,
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &'static str) -> Self {
        Csv { header, lines: Vec::new() }
    }

    /// Append one row. Cells must already be rendered (see [`fmt`]); the
    /// row must have as many cells as the header has columns.
    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.header.split(',').count());
        self.lines.push(cells.join(","));
    }

    pub fn write(&self, dir: &Path, name: &str) -> anyhow::Result<()> {
        let mut text = String::with_capacity(self.header.len() + 1 + 24 * self.lines.len());
        text.push_str(self.header);
        text.push('\n');
        for line in &self.lines {
            text.push_str(line);
            text.push('\n');
        }
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Shortest round-trip rendering of a float.
pub fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Integer cell.
pub fn fmt_u(x: usize) -> String {
    format!("{x}")
}

/// Pretty-printed JSON with a trailing newline. `serde_json` maps keep
/// their keys sorted, so nested objects serialise deterministically.
pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> anyhow::Result<()> {
    let path = dir.join(name);
    let mut text =
        serde_json::to_string_pretty(value).with_context(|| format!("encoding {name}"))?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
