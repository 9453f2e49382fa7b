//! Flat `key = value` run reports with a stable key order. Timing-derived
//! keys always render last under a `timing.` prefix, so two reports from
//! identical inputs differ only in that block.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
    timings: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut report = Report::default();
        report.put("command", command);
        report
    }

    pub fn put(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn put_seconds(&mut self, key: &str, seconds: f64) {
        self.timings.push((format!("timing.{key}"), format!("{seconds:.6}")));
    }

    /// A value computed from timings (a ratio, say): it lives in the timing
    /// block because it varies between otherwise identical runs.
    pub fn put_timing_derived(&mut self, key: &str, value: impl Display) {
        self.timings.push((format!("timing.{key}"), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries.iter().chain(&self.timings) {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(value);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())
            .with_context(|| format!("cannot write report {}", path.display()))
    }
}

/// Reads a report (or configuration-style) file back into ordered pairs.
pub fn read_key_values(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read report {}", path.display()))?;
    let mut pairs = Vec::new();
    for line in text.lines() {
        if let Some((key, value)) = line.split_once('=') {
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
    }
    Ok(pairs)
}
