//! Ingestion and preprocessing: raw records in, token documents over one
//! shared vocabulary out.

mod balance;
mod normalize;
mod pipeline;
mod seed;
mod vocab;

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::model::TopicId;

pub use balance::{stratified_balance, BalanceOutcome, BalanceWarning, Stratified};
pub use normalize::{normalize_text, tokenize_and_filter, RejectReason, Role, TokenFilter};
pub use pipeline::{preprocess, BalancePair, CorpusBookkeeping, PreprocessOutput, PreprocessReport};
pub use seed::{SeedLabel, SeedPattern, SeedScheme, SeedSchemeError, TopicKind};
pub use vocab::{build_vocabulary, VocabularyIndex};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid preprocessing configuration: {0}")]
    Config(String),
    #[error("every document was rejected during preprocessing")]
    AllDocumentsRejected,
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("record {id:?}: unknown corpus {corpus:?}")]
    UnknownCorpus { id: String, corpus: String },
}

/// One input record as found in the record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub text: String,
    pub corpus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_code: Option<String>,
    #[serde(
        default,
        deserialize_with = "date_prefix",
        skip_serializing_if = "Option::is_none"
    )]
    pub timestamp: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<String>,
}

/// Accepts `YYYY-MM-DD` or any timestamp that starts with it.
fn date_prefix<'de, D: Deserializer<'de>>(de: D) -> Result<Option<NaiveDate>, D::Error> {
    let raw: Option<String> = Option::deserialize(de)?;
    match raw {
        None => Ok(None),
        Some(s) if s.trim().is_empty() => Ok(None),
        Some(s) => {
            let head = s.get(..10).unwrap_or(&s);
            NaiveDate::parse_from_str(head, "%Y-%m-%d")
                .map(Some)
                .map_err(serde::de::Error::custom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub stopwords: BTreeSet<String>,
    pub custom_stopwords: BTreeSet<String>,
    pub name_blocklist: BTreeSet<String>,
    pub min_tokens_unlabeled: usize,
    pub min_tokens_labeled: usize,
    pub min_doc_frequency: usize,
    pub max_doc_frequency_fraction: f64,
    pub transliterate_umlauts: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            stopwords: BTreeSet::new(),
            custom_stopwords: BTreeSet::new(),
            name_blocklist: BTreeSet::new(),
            min_tokens_unlabeled: 3,
            min_tokens_labeled: 1,
            min_doc_frequency: 2,
            max_doc_frequency_fraction: 0.5,
            transliterate_umlauts: true,
        }
    }
}

impl PreprocessConfig {
    /// Default thresholds plus the standard German stopword list.
    pub fn german() -> Self {
        Self {
            stopwords: german_stopwords(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.min_tokens_labeled < 1 {
            return Err(PipelineError::Config("min_tokens_labeled must be >= 1".into()));
        }
        if self.min_tokens_unlabeled < self.min_tokens_labeled {
            return Err(PipelineError::Config(
                "min_tokens_unlabeled must be >= min_tokens_labeled".into(),
            ));
        }
        let f = self.max_doc_frequency_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(PipelineError::Config(format!(
                "max_doc_frequency_fraction must lie in (0, 1], got {f}"
            )));
        }
        Ok(())
    }

    pub fn min_tokens(&self, role: Role) -> usize {
        match role {
            Role::Labeled => self.min_tokens_labeled,
            Role::Unlabeled => self.min_tokens_unlabeled,
        }
    }
}

/// The NLTK German stopword list.
pub fn german_stopwords() -> BTreeSet<String> {
    stop_words::get(stop_words::LANGUAGE::German).into_iter().collect()
}

/// A tokenized document before vocabulary construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedDoc {
    pub id: String,
    pub corpus: String,
    pub terms: Vec<String>,
    pub seed_topic: Option<TopicId>,
    pub timestamp: Option<NaiveDate>,
    pub stratum: Option<String>,
}

impl TokenizedDoc {
    pub fn role(&self) -> Role {
        if self.seed_topic.is_some() {
            Role::Labeled
        } else {
            Role::Unlabeled
        }
    }
}

/// A preprocessed document: term ids over the shared vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDocument {
    pub id: String,
    pub corpus: String,
    pub tokens: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_topic: Option<TopicId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<String>,
}

impl TokenDocument {
    pub fn is_labeled(&self) -> bool {
        self.seed_topic.is_some()
    }
}

impl Stratified for TokenizedDoc {
    fn stratum(&self) -> Option<&str> {
        self.stratum.as_deref()
    }
}

impl Stratified for TokenDocument {
    fn stratum(&self) -> Option<&str> {
        self.stratum.as_deref()
    }
}
