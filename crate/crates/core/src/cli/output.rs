//! CSV result files with a `#`-prefixed header block.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use super::config::Resolved;

/// Shortest round-trip decimal form; scientific outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), num)
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    /// `(name, unit)` per column.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
    /// `key = value` lines placed in the header.
    pub summary: Vec<(String, String)>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = (S, S)>) -> Self {
        Self { columns: columns.into_iter().map(|(n, u)| (n.into(), u.into())).collect(), ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let k = self.columns.iter().position(|(n, _)| n == name)?;
        Some(self.rows.iter().map(|r| r[k].as_str()).collect())
    }

    pub fn render(&self, resolved: &Resolved, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# oneway {title}");
        let _ = writeln!(out, "# config_sha256 = {}", resolved.hash());
        let _ = writeln!(out, "# units: frequencies are ordinary (angular / 2pi); time is 1 / frequency unit");
        for (name, unit) in &self.columns {
            let _ = writeln!(out, "# column {name} [{unit}]");
        }
        for (key, value) in &self.summary {
            let _ = writeln!(out, "# {key} = {value}");
        }
        let _ = writeln!(out, "# resolved config:");
        for line in resolved.echo().lines() {
            let _ = writeln!(out, "#   {line}");
        }
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        let _ = writeln!(out, "{}", names.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write(&self, resolved: &Resolved, title: &str, path: &Path) -> io::Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, self.render(resolved, title))
    }
}

pub fn path_for(resolved: &Resolved, suffix: &str) -> PathBuf {
    resolved.out_dir().join(format!("{}{suffix}.csv", resolved.name()))
}
