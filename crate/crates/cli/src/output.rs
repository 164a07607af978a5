//! CSV and JSON emission shared by the data-producing subcommands.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::Format;

/// One record of a table. `fields` must match `HEADER` column for column.
pub trait Row {
    const HEADER: &'static str;
    fn fields(&self) -> Vec<String>;
}

/// Full double precision, locale independent.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header plus rows, LF terminated.
pub fn csv_body<R: Row>(rows: &[R]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(R::HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.fields().join(","));
        out.push('\n');
    }
    out
}

/// SHA-256 of the canonical CSV rendering (header and rows).
pub fn checksum<R: Row>(rows: &[R]) -> String {
    hex::encode(Sha256::digest(csv_body(rows).as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(rename = "C")]
    pub atom: f64,
    pub integral: f64,
    pub sum: f64,
    pub checksum: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub config: RunConfig,
    pub metadata: Metadata,
    pub rows: Vec<R>,
}

pub fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Writes `rows` in the configured format. CSV output carries `comments` as
/// leading `#` lines; JSON output carries the same information in `metadata`.
pub fn emit<R: Row + Serialize>(
    config: &RunConfig,
    atom: f64,
    integral: f64,
    summary: Option<serde_json::Value>,
    comments: &[String],
    rows: Vec<R>,
) -> anyhow::Result<()> {
    let path = config.output_path.as_deref().map(Path::new);
    let text = match config.output_format {
        Format::Csv => {
            let mut text: String = comments.iter().map(|c| format!("# {c}\n")).collect();
            text.push_str(&csv_body(&rows));
            text
        }
        Format::Json => {
            let doc = Document {
                config: config.clone(),
                metadata: Metadata {
                    atom,
                    integral,
                    sum: atom + integral,
                    checksum: checksum(&rows),
                    summary,
                },
                rows,
            };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
    };
    write_text(path, &text)
}
