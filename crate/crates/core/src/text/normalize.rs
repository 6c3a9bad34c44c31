use std::collections::HashSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::PreprocessConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Labeled,
    Unlabeled,
}

/// Why a document did not survive token filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "reason")]
pub enum RejectReason {
    Empty,
    TooShort { tokens: usize, minimum: usize },
}

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:[a-z][a-z0-9+.\-]*://|www\.)\S*").expect("valid regex"))
}

fn handle_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@[\p{L}\p{N}_]+").expect("valid regex"))
}

/// Canonicalizes text ahead of tokenization.
///
/// Rules, in order: lowercase, transliterate umlauts and ß (if enabled),
/// drop URLs and @-handles, replace every non-letter by a space, collapse
/// whitespace.
pub fn normalize_text(text: &str, config: &PreprocessConfig) -> String {
    let mut s = text.to_lowercase();
    if config.transliterate_umlauts {
        s = transliterate(&s);
    }
    let s = url_pattern().replace_all(&s, " ");
    let s = handle_pattern().replace_all(&s, " ");
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for ch in s.chars() {
        if ch.is_alphabetic() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(ch);
        } else {
            pending_space = true;
        }
    }
    out
}

fn transliterate(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 8);
    for ch in s.chars() {
        match ch {
            'ä' => out.push_str("ae"),
            'ö' => out.push_str("oe"),
            'ü' => out.push_str("ue"),
            'ß' => out.push_str("ss"),
            c => out.push(c),
        }
    }
    out
}

/// Normalized union of stopwords, custom stopwords and blocked names.
#[derive(Debug, Clone, Default)]
pub struct TokenFilter {
    blocked: HashSet<String>,
}

impl TokenFilter {
    pub fn new(config: &PreprocessConfig) -> Self {
        let mut blocked = HashSet::new();
        for entry in config
            .stopwords
            .iter()
            .chain(&config.custom_stopwords)
            .chain(&config.name_blocklist)
        {
            // "Angela Merkel" blocks both tokens.
            for part in normalize_text(entry, config).split_whitespace() {
                blocked.insert(part.to_string());
            }
        }
        Self { blocked }
    }

    pub fn blocks(&self, term: &str) -> bool {
        self.blocked.contains(term)
    }
}

/// Splits normalized text on whitespace and drops blocked terms.
///
/// The document is rejected when fewer than the role's minimum survive.
pub fn tokenize_and_filter(
    text: &str,
    config: &PreprocessConfig,
    filter: &TokenFilter,
    role: Role,
) -> Result<Vec<String>, RejectReason> {
    let tokens: Vec<String> = text
        .split_whitespace()
        .filter(|t| !filter.blocks(t))
        .map(str::to_string)
        .collect();
    check_length(tokens.len(), config.min_tokens(role))?;
    Ok(tokens)
}

pub(crate) fn check_length(len: usize, minimum: usize) -> Result<(), RejectReason> {
    if len == 0 {
        Err(RejectReason::Empty)
    } else if len < minimum {
        Err(RejectReason::TooShort {
            tokens: len,
            minimum,
        })
    } else {
        Ok(())
    }
}
