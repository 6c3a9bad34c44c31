use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{
    build_vocabulary, normalize_text, stratified_balance, tokenize_and_filter, BalanceWarning,
    PipelineError, PreprocessConfig, RawRecord, RejectReason, Role, SeedScheme, TokenDocument,
    TokenFilter, TokenizedDoc, VocabularyIndex,
};
use crate::corpus::CorpusSet;

/// `pool` is resampled per stratum to mirror the size of `reference`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancePair {
    pub reference: String,
    pub pool: String,
}

impl BalancePair {
    /// Audience corpora mirror the politicians on the same platform.
    pub fn five_corpora_defaults() -> Vec<BalancePair> {
        vec![
            BalancePair {
                reference: "fb-politicians".into(),
                pool: "fb-audience".into(),
            },
            BalancePair {
                reference: "tw-politicians".into(),
                pool: "tw-audience".into(),
            },
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusBookkeeping {
    pub corpus: String,
    pub raw_records: usize,
    pub excluded_seed_code: usize,
    pub rejected_empty: usize,
    pub rejected_too_short: usize,
    pub dropped_by_balance: usize,
    pub dropped_by_vocabulary: usize,
    pub documents: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PreprocessReport {
    pub corpora: Vec<CorpusBookkeeping>,
    /// Unmatched seed codes and how many records carried each.
    pub unmatched_seed_codes: BTreeMap<String, usize>,
    pub balance_warnings: Vec<(BalancePair, BalanceWarning)>,
    pub vocabulary_size: usize,
}

#[derive(Debug, Clone)]
pub struct PreprocessOutput {
    pub vocabulary: VocabularyIndex,
    pub documents: Vec<TokenDocument>,
    pub report: PreprocessReport,
}

/// Runs normalization, filtering, seed assignment, stratified balancing and
/// vocabulary construction. Document order follows record order throughout.
pub fn preprocess(
    records: &[RawRecord],
    scheme: &SeedScheme,
    corpora: &CorpusSet,
    balance: &[BalancePair],
    config: &PreprocessConfig,
    seed: u64,
) -> Result<PreprocessOutput, PipelineError> {
    config.validate()?;
    let filter = TokenFilter::new(config);
    let mut book: BTreeMap<&str, CorpusBookkeeping> = corpora
        .tags()
        .map(|t| {
            (
                t,
                CorpusBookkeeping {
                    corpus: t.to_string(),
                    ..Default::default()
                },
            )
        })
        .collect();
    let mut report = PreprocessReport::default();
    let mut seen = HashSet::new();
    let mut docs = Vec::new();

    for rec in records {
        if !seen.insert(rec.id.as_str()) {
            return Err(PipelineError::DuplicateId(rec.id.clone()));
        }
        let entry = book
            .get_mut(rec.corpus.as_str())
            .ok_or_else(|| PipelineError::UnknownCorpus {
                id: rec.id.clone(),
                corpus: rec.corpus.clone(),
            })?;
        entry.raw_records += 1;
        let labeled = corpora.is_labeled(&rec.corpus);
        let seed_topic = if labeled {
            let code = rec.seed_code.as_deref().unwrap_or("");
            match scheme.assign(code) {
                Some(t) => Some(t),
                None => {
                    log::info!("record {:?}: seed code {code:?} matches no pattern", rec.id);
                    entry.excluded_seed_code += 1;
                    *report.unmatched_seed_codes.entry(code.to_string()).or_default() += 1;
                    continue;
                }
            }
        } else {
            if rec.seed_code.is_some() {
                log::warn!("record {:?}: seed code on an unlabeled corpus ignored", rec.id);
            }
            None
        };
        let role = if labeled { Role::Labeled } else { Role::Unlabeled };
        let text = normalize_text(&rec.text, config);
        match tokenize_and_filter(&text, config, &filter, role) {
            Ok(terms) => docs.push(TokenizedDoc {
                id: rec.id.clone(),
                corpus: rec.corpus.clone(),
                terms,
                seed_topic,
                timestamp: rec.timestamp,
                stratum: rec.stratum.clone(),
            }),
            Err(RejectReason::Empty) => entry.rejected_empty += 1,
            Err(RejectReason::TooShort { .. }) => entry.rejected_too_short += 1,
        }
    }

    for (i, pair) in balance.iter().enumerate() {
        let reference: Vec<TokenizedDoc> = docs
            .iter()
            .filter(|d| d.corpus == pair.reference)
            .cloned()
            .collect();
        let pool: Vec<TokenizedDoc> = docs
            .iter()
            .filter(|d| d.corpus == pair.pool)
            .cloned()
            .collect();
        let outcome = stratified_balance(&reference, &pool, seed.wrapping_add(i as u64));
        let keep: HashSet<&str> = outcome.sampled.iter().map(|d| d.id.as_str()).collect();
        let before = pool.len();
        docs.retain(|d| d.corpus != pair.pool || keep.contains(d.id.as_str()));
        if let Some(entry) = book.get_mut(pair.pool.as_str()) {
            entry.dropped_by_balance += before - keep.len();
        }
        report
            .balance_warnings
            .extend(outcome.warnings.into_iter().map(|w| (pair.clone(), w)));
    }

    let mut before_vocab: HashMap<String, usize> = HashMap::new();
    for d in &docs {
        *before_vocab.entry(d.corpus.clone()).or_default() += 1;
    }
    let (vocabulary, documents) = build_vocabulary(docs, config)?;
    for d in &documents {
        if let Some(entry) = book.get_mut(d.corpus.as_str()) {
            entry.documents += 1;
            entry.tokens += d.tokens.len();
        }
    }
    for entry in book.values_mut() {
        entry.dropped_by_vocabulary =
            before_vocab.get(&entry.corpus).copied().unwrap_or(0) - entry.documents;
    }
    report.vocabulary_size = vocabulary.len();
    report.corpora = corpora
        .tags()
        .map(|t| book.remove(t).expect("every corpus has a ledger entry"))
        .collect();
    Ok(PreprocessOutput {
        vocabulary,
        documents,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TopicId;

    fn rec(id: &str, corpus: &str, text: &str, code: Option<&str>, stratum: Option<&str>) -> RawRecord {
        RawRecord {
            id: id.into(),
            text: text.into(),
            corpus: corpus.into(),
            seed_code: code.map(Into::into),
            timestamp: None,
            stratum: stratum.map(Into::into),
        }
    }

    fn config() -> PreprocessConfig {
        PreprocessConfig {
            min_doc_frequency: 1,
            max_doc_frequency_fraction: 1.0,
            ..PreprocessConfig::german()
        }
    }

    #[test]
    fn labeled_and_unlabeled_roles() {
        let records = vec![
            rec("s1", "survey", "Die Schulden!", Some("4311"), None),
            rec("s2", "survey", "Ostdeutschland", Some("9999"), None),
            rec("t1", "tw-politicians", "Schulden und Euro Krise", None, Some("FDP")),
            rec("t2", "tw-politicians", "Euro", None, Some("FDP")),
        ];
        let out = preprocess(
            &records,
            &SeedScheme::gles_2013(),
            &CorpusSet::five_corpora(),
            &[],
            &config(),
            1,
        )
        .unwrap();
        assert_eq!(out.documents.len(), 2);
        assert_eq!(out.documents[0].seed_topic, Some(TopicId(3)));
        assert_eq!(out.documents[1].seed_topic, None);
        assert_eq!(out.report.unmatched_seed_codes.get("9999"), Some(&1));
        let survey = &out.report.corpora[0];
        assert_eq!((survey.raw_records, survey.excluded_seed_code, survey.documents), (2, 1, 1));
        let tw = &out.report.corpora[2];
        assert_eq!((tw.rejected_too_short, tw.documents, tw.tokens), (1, 1, 3));
    }

    #[test]
    fn audience_is_balanced_by_party() {
        let mut records = Vec::new();
        for i in 0..4 {
            records.push(rec(&format!("p{i}"), "tw-politicians", "steuer euro schulden", None, Some("SPD")));
        }
        for i in 0..10 {
            records.push(rec(&format!("a{i}"), "tw-audience", "steuer euro schulden", None, Some("SPD")));
        }
        records.push(rec("a-x", "tw-audience", "steuer euro schulden", None, Some("CDU")));
        let out = preprocess(
            &records,
            &SeedScheme::gles_2013(),
            &CorpusSet::five_corpora(),
            &BalancePair::five_corpora_defaults(),
            &config(),
            5,
        )
        .unwrap();
        let audience = out.documents.iter().filter(|d| d.corpus == "tw-audience").count();
        assert_eq!(audience, 4);
        assert_eq!(out.report.corpora[4].dropped_by_balance, 7);
    }

    #[test]
    fn errors() {
        let scheme = SeedScheme::gles_2013();
        let corpora = CorpusSet::five_corpora();
        let dup = vec![
            rec("x", "survey", "schulden", Some("4311"), None),
            rec("x", "survey", "schulden", Some("4311"), None),
        ];
        assert!(matches!(
            preprocess(&dup, &scheme, &corpora, &[], &config(), 0),
            Err(PipelineError::DuplicateId(_))
        ));
        let unknown = vec![rec("x", "radio", "schulden", None, None)];
        assert!(matches!(
            preprocess(&unknown, &scheme, &corpora, &[], &config(), 0),
            Err(PipelineError::UnknownCorpus { .. })
        ));
        let rejected = vec![rec("x", "tw-audience", "und", None, None)];
        assert!(matches!(
            preprocess(&rejected, &scheme, &corpora, &[], &config(), 0),
            Err(PipelineError::AllDocumentsRejected)
        ));
    }
}
