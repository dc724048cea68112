//! Report rendering and atomic file output.

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A tabular result: header plus already-formatted rows.
pub struct Table {
    pub header: String,
    pub rows: Vec<String>,
}

impl Table {
    pub fn from_csv(text: &str) -> Table {
        let mut lines = text.lines().map(str::to_owned);
        let header = lines.next().unwrap_or_default();
        Table { header, rows: lines.collect() }
    }

    fn render(&self) -> String {
        let mut out = self.header.clone();
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// Everything one subcommand produced, plus the provenance needed to rerun it.
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub workers: usize,
    pub config: Value,
    pub result: Value,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, workers: usize, config: &impl Serialize, result: Value) -> Report {
        let config = serde_json::to_value(config).expect("config serializes");
        Report { command, seed, workers, config, result, table: None }
    }

    pub fn with_table(mut self, t: Table) -> Report {
        self.table = Some(t);
        self
    }

    pub fn header_lines(&self) -> String {
        format!("# command={} seed={} workers={}\n# config={}\n", self.command, self.seed, self.workers, self.config)
    }

    pub fn to_json(&self) -> String {
        let v = json!({
            "command": self.command,
            "seed": self.seed,
            "workers": self.workers,
            "config": self.config,
            "result": self.result,
        });
        let mut s = serde_json::to_string(&v).expect("report serializes");
        s.push('\n');
        s
    }

    /// The table if there is one, otherwise the scalar leaves of the result as `key,value` rows.
    pub fn to_csv(&self) -> String {
        let body = match &self.table {
            Some(t) => t.render(),
            None => {
                let mut rows = Vec::new();
                flatten("", &self.result, &mut rows);
                Table { header: "key,value".into(), rows }.render()
            }
        };
        self.header_lines() + &body
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => flatten_map(prefix, m, out),
        Value::Array(_) => {}
        Value::String(s) => out.push(format!("{prefix},{s}")),
        other => out.push(format!("{prefix},{other}")),
    }
}

fn flatten_map(prefix: &str, m: &Map<String, Value>, out: &mut Vec<String>) {
    for (k, v) in m {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        flatten(&key, v, out);
    }
}

/// Writes to a temporary file beside `path` and renames it into place, or to stdout.
pub fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(body.as_bytes())?;
        return Ok(out.flush()?);
    };
    write_atomic(path, body.as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
