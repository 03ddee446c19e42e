//! CSV emission and run-status plumbing.

use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Outcome of a subcommand, mapped onto the process exit code:
/// 0 = every enabled check passed, 2 = inconclusive (discretization
/// floor), 1 = failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Pass,
    Inconclusive,
    Fail,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::Inconclusive => 2,
            RunStatus::Fail => 1,
        }
    }

    pub fn merge(self, other: RunStatus) -> RunStatus {
        use RunStatus::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RunStatus::Pass => "pass",
            RunStatus::Inconclusive => "inconclusive",
            RunStatus::Fail => "FAIL",
        }
    }
}

/// A CSV cell; floats print with round-trip precision so reruns are
/// byte-identical.
pub enum Cell {
    Str(String),
    Float(f64),
    Int(i64),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(x) => Cell::Float(x),
            None => Cell::Empty,
        }
    }
}

fn push_cell(out: &mut String, cell: &Cell) {
    match cell {
        Cell::Str(s) => out.push_str(s),
        Cell::Float(v) => {
            if v.is_nan() {
                out.push_str("nan");
            } else {
                let _ = write!(out, "{v}");
            }
        }
        Cell::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Cell::Bool(v) => {
            let _ = write!(out, "{v}");
        }
        Cell::Empty => {}
    }
}

/// Writes a CSV file with optional `#`-prefixed preamble lines.
pub fn write_csv(
    path: &Path,
    preamble: &[&str],
    header: &[&str],
    rows: &[Vec<Cell>],
) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
    }
    let mut text = String::new();
    for line in preamble {
        let _ = writeln!(text, "# {line}");
    }
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                text.push(',');
            }
            push_cell(&mut text, cell);
        }
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
