use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::normalize::check_length;
use super::{PipelineError, PreprocessConfig, TokenDocument, TokenizedDoc};
use crate::io::sha256_hex;

/// Bijection between terms and dense ids `0..V`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VocabularyIndex {
    terms: Vec<String>,
    ids: HashMap<String, u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VocabEntry {
    pub id: u32,
    pub term: String,
}

impl VocabularyIndex {
    pub fn from_terms(terms: Vec<String>) -> Self {
        let ids = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self { terms, ids }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn entries(&self) -> impl Iterator<Item = VocabEntry> + '_ {
        self.terms.iter().enumerate().map(|(i, t)| VocabEntry {
            id: i as u32,
            term: t.clone(),
        })
    }

    /// Rebuilds an index from persisted entries; ids must be dense and in order.
    pub fn from_entries(entries: Vec<VocabEntry>) -> Result<Self, String> {
        let mut terms = Vec::with_capacity(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            if e.id as usize != i {
                return Err(format!("vocabulary id {} at position {i}", e.id));
            }
            terms.push(e.term);
        }
        let index = Self::from_terms(terms);
        if index.ids.len() != index.terms.len() {
            return Err("vocabulary contains duplicate terms".into());
        }
        Ok(index)
    }

    /// Content hash used to tie model states to their vocabulary.
    pub fn digest(&self) -> String {
        sha256_hex(self.terms.join("\n").as_bytes())
    }
}

/// Prunes rare and overly common terms and assigns term ids.
///
/// Terms with document frequency below `min_doc_frequency` or above
/// `max_doc_frequency_fraction * D` are dropped, then the length filters are
/// re-applied. Both steps repeat until nothing changes, so every indexed term
/// occurs in at least `min_doc_frequency` surviving documents. Ids follow first
/// occurrence in the surviving document stream.
pub fn build_vocabulary(
    docs: Vec<TokenizedDoc>,
    config: &PreprocessConfig,
) -> Result<(VocabularyIndex, Vec<TokenDocument>), PipelineError> {
    config.validate()?;
    let mut docs = docs;
    loop {
        let mut df: HashMap<&str, usize> = HashMap::new();
        for doc in &docs {
            let unique: HashSet<&str> = doc.terms.iter().map(String::as_str).collect();
            for t in unique {
                *df.entry(t).or_default() += 1;
            }
        }
        let max_df = config.max_doc_frequency_fraction * docs.len() as f64;
        let dropped: HashSet<String> = df
            .into_iter()
            .filter(|&(_, n)| n < config.min_doc_frequency || n as f64 > max_df)
            .map(|(t, _)| t.to_string())
            .collect();
        let before = docs.len();
        if !dropped.is_empty() {
            for doc in &mut docs {
                doc.terms.retain(|t| !dropped.contains(t));
            }
        }
        docs.retain(|d| check_length(d.terms.len(), config.min_tokens(d.role())).is_ok());
        if dropped.is_empty() && docs.len() == before {
            break;
        }
    }
    if docs.is_empty() {
        return Err(PipelineError::AllDocumentsRejected);
    }

    let mut terms = Vec::new();
    let mut ids: HashMap<String, u32> = HashMap::new();
    let out = docs
        .into_iter()
        .map(|doc| {
            let tokens = doc
                .terms
                .into_iter()
                .map(|t| {
                    if let Some(&id) = ids.get(&t) {
                        id
                    } else {
                        let id = terms.len() as u32;
                        terms.push(t.clone());
                        ids.insert(t, id);
                        id
                    }
                })
                .collect();
            TokenDocument {
                id: doc.id,
                corpus: doc.corpus,
                tokens,
                seed_topic: doc.seed_topic,
                timestamp: doc.timestamp,
                stratum: doc.stratum,
            }
        })
        .collect();
    Ok((VocabularyIndex { terms, ids }, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TopicId;
    use proptest::prelude::*;

    fn doc(id: &str, terms: &[&str], labeled: bool) -> TokenizedDoc {
        TokenizedDoc {
            id: id.into(),
            corpus: if labeled { "survey" } else { "tw" }.into(),
            terms: terms.iter().map(|s| s.to_string()).collect(),
            seed_topic: labeled.then_some(TopicId(1)),
            timestamp: None,
            stratum: None,
        }
    }

    #[test]
    fn singleton_term_is_dropped() {
        let cfg = PreprocessConfig {
            max_doc_frequency_fraction: 1.0,
            ..Default::default()
        };
        let docs = vec![
            doc("a", &["euro", "krise", "rare"], false),
            doc("b", &["euro", "krise", "bank"], false),
            doc("c", &["euro", "krise", "bank"], false),
        ];
        let (vocab, out) = build_vocabulary(docs, &cfg).unwrap();
        assert_eq!(vocab.id("rare"), None);
        // "a" lost "rare" and fell below three tokens
        assert_eq!(out.len(), 2);
        assert_eq!(vocab.terms(), &["euro", "krise", "bank"]);
    }

    #[test]
    fn two_documents_sharing_three_terms() {
        // Every shared term sits at df = D here, so the upper cutoff has to be open.
        let cfg = PreprocessConfig {
            max_doc_frequency_fraction: 1.0,
            ..Default::default()
        };
        let docs = vec![
            doc("a", &["steuern", "schulden", "euro"], false),
            doc("b", &["euro", "schulden", "steuern"], false),
        ];
        let (vocab, out) = build_vocabulary(docs, &cfg).unwrap();
        assert_eq!(vocab.len(), 3);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].tokens, vec![2, 1, 0]);
    }

    #[test]
    fn default_upper_cutoff_drops_ubiquitous_terms() {
        let cfg = PreprocessConfig::default();
        let docs = vec![
            doc("a", &["x", "a1", "a2", "a3"], false),
            doc("b", &["x", "a1", "a2", "a3"], false),
            doc("c", &["x", "b1", "b2", "b3"], false),
            doc("d", &["x", "b1", "b2", "b3"], false),
        ];
        let (vocab, out) = build_vocabulary(docs, &cfg).unwrap();
        assert_eq!(vocab.id("x"), None);
        assert_eq!(vocab.len(), 6);
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn identity_filter() {
        let cfg = PreprocessConfig {
            min_doc_frequency: 1,
            max_doc_frequency_fraction: 1.0,
            ..Default::default()
        };
        let docs = vec![doc("a", &["p", "q", "r"], false), doc("b", &["s"], true)];
        let (vocab, out) = build_vocabulary(docs, &cfg).unwrap();
        assert_eq!(vocab.len(), 4);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn all_rejected_is_an_error() {
        let docs = vec![doc("a", &["p", "q", "r"], false)];
        assert!(matches!(
            build_vocabulary(docs, &PreprocessConfig::default()),
            Err(PipelineError::AllDocumentsRejected)
        ));
    }

    proptest! {
        #[test]
        fn ids_in_range_and_frequency_floor_holds(
            raw in proptest::collection::vec(proptest::collection::vec(0u8..12, 1..7), 1..25),
            min_df in 1usize..4,
        ) {
            let docs: Vec<TokenizedDoc> = raw.iter().enumerate().map(|(i, ts)| {
                let terms: Vec<String> = ts.iter().map(|t| format!("t{t}")).collect();
                let refs: Vec<&str> = terms.iter().map(String::as_str).collect();
                doc(&format!("d{i}"), &refs, i % 3 == 0)
            }).collect();
            let cfg = PreprocessConfig { min_doc_frequency: min_df, max_doc_frequency_fraction: 0.8, ..Default::default() };
            if let Ok((vocab, out)) = build_vocabulary(docs.clone(), &cfg) {
                let v = vocab.len() as u32;
                for d in &out {
                    prop_assert!(d.tokens.iter().all(|&t| t < v));
                }
                for id in 0..v {
                    let df = out.iter().filter(|d| d.tokens.contains(&id)).count();
                    prop_assert!(df >= min_df);
                }
                let again = build_vocabulary(docs, &cfg).unwrap();
                prop_assert_eq!(again.0, vocab);
                prop_assert_eq!(again.1, out);
            }
        }
    }
}
