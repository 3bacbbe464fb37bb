use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::Resolved;

/// One line of the common results table.
#[derive(Serialize)]
pub struct Row {
    pub experiment_id: String,
    #[serde(rename = "N")]
    pub size: u32,
    pub s: String,
    pub event: String,
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

pub fn experiment_id(r: &Resolved, command: &str) -> String {
    format!("{command}-seed{}", r.seed)
}

pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path)
}

pub fn prepare_out(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

/// Writes `<command>.manifest.json` with the full resolved configuration.
pub fn write_manifest(r: &Resolved, command: &str) -> anyhow::Result<PathBuf> {
    let path = r.out.join(format!("{command}.manifest.json"));
    let mut text = serde_json::to_string_pretty(&r.cfg)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}
