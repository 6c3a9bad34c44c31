use std::fs::File;
use std::path::Path;

use seedtopic::io::{read_jsonl, read_plain_jsonl, FileHeader, DOCUMENTS_FORMAT, VOCABULARY_FORMAT};
use seedtopic::model::StateFile;
use seedtopic::text::{RawRecord, SeedScheme, TokenDocument, VocabularyIndex};
use seedtopic::ModelState;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::{CmdResult, Failure};
use crate::output::{out_path, DOCUMENTS_FILE, STATE_FILE, VOCABULARY_FILE};

/// Records from JSON lines, or from CSV/TSV with a header row.
pub fn read_records(path: &Path) -> CmdResult<Vec<RawRecord>> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let records = match ext.as_str() {
        "csv" | "tsv" => {
            let file = File::open(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            let mut rdr = csv::ReaderBuilder::new()
                .delimiter(if ext == "tsv" { b'\t' } else { b',' })
                .from_reader(file);
            let mut out = Vec::new();
            for row in rdr.deserialize::<RawRecord>() {
                out.push(row.map_err(|e| Failure::data(format!("{}: {e}", path.display())))?);
            }
            if out.is_empty() {
                return Err(Failure::data(format!("{}: file is empty", path.display())));
            }
            out
        }
        _ => read_plain_jsonl(path)?,
    };
    Ok(records)
}

pub fn records(cfg: &RunConfig) -> CmdResult<Vec<RawRecord>> {
    let path = cfg
        .paths
        .records
        .as_ref()
        .ok_or_else(|| Failure::config("paths.records is not set"))?;
    read_records(path)
}

pub fn scheme(cfg: &RunConfig) -> CmdResult<SeedScheme> {
    match &cfg.paths.seed_scheme {
        None => Ok(SeedScheme::gles_2013()),
        Some(path) => {
            let f = File::open(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            SeedScheme::from_reader(f).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
        }
    }
}

fn warn_on_hash(cfg: &RunConfig, what: &str, header: &FileHeader) {
    if header.config_hash != cfg.hash() {
        log::warn!(
            "{what} was written under config hash {}, the current config hashes to {}",
            header.config_hash,
            cfg.hash()
        );
    }
}

pub struct Corpus {
    pub docs: Vec<TokenDocument>,
    pub vocab: VocabularyIndex,
}

/// Preprocessed documents and vocabulary from the output directory.
pub fn corpus(cfg: &RunConfig) -> CmdResult<Corpus> {
    let doc_path = out_path(cfg, DOCUMENTS_FILE);
    let vocab_path = out_path(cfg, VOCABULARY_FILE);
    for p in [&doc_path, &vocab_path] {
        if !p.is_file() {
            return Err(Failure::data(format!("{} not found; run `seedtopic preprocess` first", p.display())));
        }
    }
    let (header, docs) = read_jsonl::<TokenDocument>(&doc_path, DOCUMENTS_FORMAT)?;
    warn_on_hash(cfg, "documents", &header);
    let (_, entries) = read_jsonl(&vocab_path, VOCABULARY_FORMAT)?;
    let vocab = VocabularyIndex::from_entries(entries).map_err(|e| Failure::data(format!("{}: {e}", vocab_path.display())))?;
    Ok(Corpus { docs, vocab })
}

pub struct Fitted {
    pub file: StateFile,
    pub state: ModelState,
    pub rng: ChaCha8Rng,
}

/// The saved state, replayed over the documents and verified.
pub fn fitted(cfg: &RunConfig, corpus: &Corpus) -> CmdResult<Fitted> {
    let path = out_path(cfg, STATE_FILE);
    if !path.is_file() {
        return Err(Failure::data(format!("{} not found; run `seedtopic train` first", path.display())));
    }
    let file = StateFile::load(&path)?;
    if file.config_hash != cfg.hash() {
        log::warn!(
            "state was trained under config hash {}, the current config hashes to {}",
            file.config_hash,
            cfg.hash()
        );
    }
    let (state, rng) = file.restore(corpus.docs.clone(), &corpus.vocab.digest())?;
    Ok(Fitted { file, state, rng })
}
