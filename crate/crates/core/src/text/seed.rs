//! Mapping of hierarchical survey codes onto seed topics.
//!
//! A scheme file is tab-separated: `pattern<TAB>label[<TAB>type]`. Patterns are
//! digit strings with trailing `X` wildcards ("431X"); several patterns may
//! share a label. Topic ids are assigned `1..=K` in order of first label
//! appearance.

use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::TopicId;

/// Scheme used for the 18 training topics of the 2013 election study.
pub const GLES_2013_SCHEME: &str = include_str!("../../assets/seed_scheme.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopicKind {
    Policy,
    Politics,
    Polity,
}

impl std::str::FromStr for TopicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "policy" => Ok(TopicKind::Policy),
            "politics" => Ok(TopicKind::Politics),
            "polity" => Ok(TopicKind::Polity),
            other => Err(format!("unknown topic type {other:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum SeedSchemeError {
    #[error("seed scheme line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("seed patterns {first:?} and {second:?} overlap")]
    Overlap { first: String, second: String },
    #[error("seed scheme has no patterns")]
    Empty,
    #[error("seed scheme: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPattern {
    pub pattern: String,
    pub topic: TopicId,
}

impl SeedPattern {
    /// Digit-wise comparison with `X` as a wildcard; lengths must agree.
    pub fn matches(&self, code: &str) -> bool {
        let code = code.trim();
        code.len() == self.pattern.len()
            && self
                .pattern
                .bytes()
                .zip(code.bytes())
                .all(|(p, c)| p == b'X' || p == c)
    }

    fn overlaps(&self, other: &SeedPattern) -> bool {
        self.pattern.len() == other.pattern.len()
            && self
                .pattern
                .bytes()
                .zip(other.pattern.bytes())
                .all(|(a, b)| a == b'X' || b == b'X' || a == b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLabel {
    pub topic: TopicId,
    pub label: String,
    pub kind: TopicKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedScheme {
    patterns: Vec<SeedPattern>,
    labels: Vec<SeedLabel>,
}

impl SeedScheme {
    pub fn gles_2013() -> Self {
        Self::from_reader(GLES_2013_SCHEME.as_bytes()).expect("bundled scheme is valid")
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, SeedSchemeError> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut patterns: Vec<SeedPattern> = Vec::new();
        let mut labels: Vec<SeedLabel> = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let line = row.position().map_or(i + 1, |p| p.line() as usize);
            if row.iter().all(str::is_empty) {
                continue;
            }
            if row.len() < 2 {
                return Err(SeedSchemeError::Malformed {
                    line,
                    message: "expected pattern and label".into(),
                });
            }
            let pattern = row[0].to_ascii_uppercase();
            if pattern.is_empty()
                || !pattern.bytes().all(|b| b.is_ascii_digit() || b == b'X')
                || pattern.trim_end_matches('X').contains('X')
            {
                return Err(SeedSchemeError::Malformed {
                    line,
                    message: format!("bad pattern {:?}", &row[0]),
                });
            }
            let kind = match row.get(2).filter(|s| !s.is_empty()) {
                Some(k) => k
                    .parse()
                    .map_err(|message| SeedSchemeError::Malformed { line, message })?,
                None => TopicKind::Policy,
            };
            let label = row[1].to_string();
            let topic = match labels.iter().find(|l| l.label == label) {
                Some(l) => {
                    if l.kind != kind {
                        return Err(SeedSchemeError::Malformed {
                            line,
                            message: format!("label {label:?} given two types"),
                        });
                    }
                    l.topic
                }
                None => {
                    let topic = TopicId(labels.len() as u32 + 1);
                    labels.push(SeedLabel { topic, label, kind });
                    topic
                }
            };
            let candidate = SeedPattern { pattern, topic };
            if let Some(prev) = patterns.iter().find(|p| p.overlaps(&candidate)) {
                return Err(SeedSchemeError::Overlap {
                    first: prev.pattern.clone(),
                    second: candidate.pattern,
                });
            }
            patterns.push(candidate);
        }
        if patterns.is_empty() {
            return Err(SeedSchemeError::Empty);
        }
        Ok(Self { patterns, labels })
    }

    /// Number of seed topics.
    pub fn topic_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[SeedLabel] {
        &self.labels
    }

    pub fn patterns(&self) -> &[SeedPattern] {
        &self.patterns
    }

    pub fn label(&self, topic: TopicId) -> Option<&SeedLabel> {
        self.labels.iter().find(|l| l.topic == topic)
    }

    /// Topic of the unique pattern matching `code`, if any.
    pub fn assign(&self, code: &str) -> Option<TopicId> {
        self.patterns.iter().find(|p| p.matches(code)).map(|p| p.topic)
    }
}
