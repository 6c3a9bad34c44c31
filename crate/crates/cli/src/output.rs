use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use seedtopic::io::FileHeader;

use crate::config::RunConfig;
use crate::error::{Classify, CmdResult, ExitClass};

pub const DOCUMENTS_FILE: &str = "documents.jsonl";
pub const VOCABULARY_FILE: &str = "vocabulary.jsonl";
pub const PREPROCESS_REPORT_FILE: &str = "preprocess_report.json";
pub const STATE_FILE: &str = "state.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.jsonl";
/// Wall-clock timings; the only output that differs between identical runs.
pub const TIMINGS_FILE: &str = "timings.json";
pub const ANALYSIS_DIR: &str = "analysis";
pub const LABELING_DIR: &str = "labeling";

pub fn header(cfg: &RunConfig, format: &str) -> FileHeader {
    FileHeader::new(format, &cfg.hash(), cfg.model.rng_seed).with_run_id(&cfg.run_id())
}

pub fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.paths.out.join(name)
}

pub fn ensure_dir(dir: &Path) -> CmdResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", dir.display()))
        .class(ExitClass::Config)
}

fn create(path: &Path) -> CmdResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
        .class(ExitClass::Other)
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> crate::error::Failure + '_ {
    move |e| crate::error::Failure::new(ExitClass::Other, anyhow::anyhow!("{}: {e}", path.display()))
}

/// A JSON object `{"header": ..., "<key>": value}` on a single pretty document.
pub fn write_json<T: Serialize>(path: &Path, header: &FileHeader, key: &str, value: &T) -> CmdResult<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("header".into(), serde_json::to_value(header).expect("serializable header"));
    doc.insert(key.into(), serde_json::to_value(value).expect("serializable value"));
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &doc).expect("serializable document");
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Tab-separated table preceded by a `#` line carrying the header fields.
pub fn write_tsv(path: &Path, header: &FileHeader, columns: &[&str], rows: &[Vec<String>]) -> CmdResult<()> {
    let mut w = create(path)?;
    let mut text = header_comment(header);
    text.push_str(&columns.join("\t"));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join("\t"));
        text.push('\n');
    }
    w.write_all(text.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Free text preceded by the same `#` header line as the tables.
pub fn write_text(path: &Path, header: &FileHeader, body: &str) -> CmdResult<()> {
    let mut w = create(path)?;
    w.write_all(header_comment(header).as_bytes())
        .and_then(|_| w.write_all(body.as_bytes()))
        .map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn header_comment(h: &FileHeader) -> String {
    format!(
        "# format={} version={} config_hash={} seed={} run_id={}\n",
        h.format,
        h.version,
        h.config_hash,
        h.seed,
        h.run_id.as_deref().unwrap_or("-")
    )
}

pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `12345` → `12,345`.
pub fn grouped(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        assert_eq!(grouped(0), "0");
        assert_eq!(grouped(999), "999");
        assert_eq!(grouped(22186), "22,186");
        assert_eq!(grouped(1234567), "1,234,567");
    }
}
