//! Artifact writing: deterministic JSON reports (stable field order, no
//! timestamps) and CSV tables with shortest-round-trip float formatting.
//! Re-running a command with the same config overwrites byte-identical
//! files.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::Ctx;

/// SHA-256 hex digest of the resolved configuration, embedded in every
/// report for provenance.
pub fn config_digest<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_json_report<T: Serialize>(ctx: &Ctx, name: &str, report: &T) -> Result<()> {
    if !ctx.selection.json {
        return Ok(());
    }
    std::fs::create_dir_all(&ctx.out_dir)
        .with_context(|| format!("creating {}", ctx.out_dir.display()))?;
    let path = ctx.out_dir.join(name);
    let mut payload = serde_json::to_string_pretty(report).context("serializing report")?;
    payload.push('\n');
    std::fs::write(&path, payload).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// A CSV table; every cell is already formatted.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn fmt_f64(v: f64) -> String {
    // `{}` prints the shortest string that parses back to the same f64
    format!("{v}")
}

pub fn write_table(ctx: &Ctx, name: &str, table: &Table) -> Result<()> {
    if !ctx.selection.csv {
        return Ok(());
    }
    std::fs::create_dir_all(&ctx.out_dir)
        .with_context(|| format!("creating {}", ctx.out_dir.display()))?;
    let path = ctx.out_dir.join(name);
    let mut text = String::new();
    if ctx.gnuplot_ready {
        text.push_str("# ");
    }
    text.push_str(&table.header.join(","));
    text.push('\n');
    for row in &table.rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
