//! Atomic JSON/JSONL writers and the committed-baseline file format.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const BASELINES_SCHEMA: &str = "nmcond.baselines/1";

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.into()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut text = String::new();
    for r in rows {
        text.push_str(&serde_json::to_string(r).map_err(|e| CliError::Usage(e.into()))?);
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

/// Committed regression values: entry key, then metric name, then the exact
/// value as text.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Baselines {
    pub schema: String,
    pub entries: BTreeMap<String, BTreeMap<String, String>>,
}

impl Baselines {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading baselines {}", path.display()))
            .map_err(CliError::Usage)?;
        let b: Baselines = serde_json::from_str(&text)
            .with_context(|| format!("parsing baselines {}", path.display()))
            .map_err(CliError::Usage)?;
        if b.schema != BASELINES_SCHEMA {
            return Err(CliError::usage(format!("baselines schema {:?}", b.schema)));
        }
        Ok(b)
    }
}

/// Outcome of comparing one entry's metrics with its baseline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    Drift,
    NoBaseline,
    Skipped,
}

pub fn compare(baselines: Option<&Baselines>, key: &str, measured: &BTreeMap<String, String>) -> (Verdict, Vec<String>) {
    let Some(expected) = baselines.and_then(|b| b.entries.get(key)) else {
        return (Verdict::NoBaseline, vec![]);
    };
    let mut drift = Vec::new();
    for (metric, want) in expected {
        match measured.get(metric) {
            Some(got) if got == want => {}
            Some(got) => drift.push(format!("{metric}: expected {want}, measured {got}")),
            None => drift.push(format!("{metric}: not measured")),
        }
    }
    if drift.is_empty() {
        (Verdict::Match, drift)
    } else {
        (Verdict::Drift, drift)
    }
}

/// Turns drift (and, in strict mode, missing baselines) into a violation
/// naming every offending entry.
pub fn enforce(rows: &[(String, Verdict, Vec<String>)], strict: bool) -> Result<(), CliError> {
    let mut bad = Vec::new();
    for (key, verdict, notes) in rows {
        match verdict {
            Verdict::Drift => bad.push(format!("{key} drifted ({})", notes.join("; "))),
            Verdict::NoBaseline if strict => bad.push(format!("{key} has no committed baseline")),
            _ => {}
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(bad.join("\n")))
    }
}
