//! Line-delimited JSON files with a leading header record.
//!
//! Every file written by the pipeline starts with one `{"header": {...}}` line
//! recording the format name, version, canonical config hash and RNG seed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DOCUMENTS_FORMAT: &str = "seedtopic-documents";
pub const VOCABULARY_FORMAT: &str = "seedtopic-vocabulary";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: missing header line")]
    MissingHeader { path: PathBuf },
    #[error("{path}: expected format {expected:?}, found {found:?}")]
    WrongFormat {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}: file is empty")]
    Empty { path: PathBuf },
}

impl IoError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHeader {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
}

impl FileHeader {
    pub fn new(format: &str, config_hash: &str, seed: u64) -> Self {
        Self {
            format: format.to_string(),
            version: 1,
            config_hash: config_hash.to_string(),
            seed,
            run_id: None,
        }
    }

    pub fn with_run_id(mut self, run_id: &str) -> Self {
        self.run_id = Some(run_id.to_string());
        self
    }
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: FileHeader,
}

/// Hex SHA-256 of arbitrary bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_jsonl<T: Serialize>(
    path: &Path,
    header: &FileHeader,
    items: impl IntoIterator<Item = T>,
) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_line(&mut out, path, &HeaderLine {
        header: header.clone(),
    })?;
    for item in items {
        write_line(&mut out, path, &item)?;
    }
    out.flush().map_err(|e| IoError::io(path, e))
}

fn write_line<W: Write, T: Serialize>(out: &mut W, path: &Path, value: &T) -> Result<(), IoError> {
    let line = serde_json::to_string(value).expect("serializable record");
    out.write_all(line.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| IoError::io(path, e))
}

/// Reads a headered JSONL file, checking the format name.
pub fn read_jsonl<T: DeserializeOwned>(
    path: &Path,
    expected_format: &str,
) -> Result<(FileHeader, Vec<T>), IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let header = loop {
        match lines.next() {
            None => return Err(IoError::MissingHeader { path: path.into() }),
            Some((i, line)) => {
                let line = line.map_err(|e| IoError::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed: HeaderLine = serde_json::from_str(&line).map_err(|source| {
                    if line.contains("\"header\"") {
                        IoError::Parse {
                            path: path.into(),
                            line: i + 1,
                            source,
                        }
                    } else {
                        IoError::MissingHeader { path: path.into() }
                    }
                })?;
                break parsed.header;
            }
        }
    };
    if header.format != expected_format {
        return Err(IoError::WrongFormat {
            path: path.into(),
            expected: expected_format.into(),
            found: header.format,
        });
    }
    let mut items = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line).map_err(|source| IoError::Parse {
            path: path.into(),
            line: i + 1,
            source,
        })?);
    }
    Ok((header, items))
}

/// Reads a plain JSONL file without header (raw input records).
pub fn read_plain_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut items = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line).map_err(|source| IoError::Parse {
            path: path.into(),
            line: i + 1,
            source,
        })?);
    }
    if items.is_empty() {
        return Err(IoError::Empty { path: path.into() });
    }
    Ok(items)
}

/// One term per line, `#` comments and blank lines skipped.
pub fn read_term_list(path: &Path) -> Result<Vec<String>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}
