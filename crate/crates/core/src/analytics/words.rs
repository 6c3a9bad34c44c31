use serde::Serialize;

use super::AnalyticsError;
use crate::model::{ModelState, TopicId};
use crate::text::VocabularyIndex;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopWord {
    pub term: String,
    pub count: u32,
    /// `n^G_kw + n^M_kw + β`.
    pub weight: f64,
}

/// The `n` highest-weighted terms of a topic, ties broken by the term string.
/// Asking for more than `V` terms returns all of them.
pub fn top_words(
    state: &ModelState,
    vocab: &VocabularyIndex,
    topic: TopicId,
    n: usize,
) -> Result<Vec<TopWord>, AnalyticsError> {
    let t = state.topic(topic).ok_or(AnalyticsError::NoSuchTopic(topic))?;
    let beta = state.params().beta;
    let term = |id: u32| vocab.term(id).unwrap_or("?").to_string();
    let mut seen: Vec<(u32, u32)> = t.combined_terms();
    seen.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| term(a.0).cmp(&term(b.0))));
    let mut out: Vec<TopWord> = seen
        .iter()
        .take(n)
        .map(|&(id, count)| TopWord {
            term: term(id),
            count,
            weight: count as f64 + beta,
        })
        .collect();
    if out.len() < n {
        let mut unseen: Vec<&str> = vocab
            .terms()
            .iter()
            .enumerate()
            .filter(|(id, _)| t.term_count(*id as u32) == 0)
            .map(|(_, s)| s.as_str())
            .collect();
        unseen.sort_unstable();
        out.extend(unseen.into_iter().take(n - out.len()).map(|s| TopWord {
            term: s.to_string(),
            count: 0,
            weight: beta,
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::text::TokenDocument;

    fn state(tokens: &[&[u32]]) -> ModelState {
        let docs = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| TokenDocument {
                id: format!("d{i}"),
                corpus: "s".into(),
                tokens: t.to_vec(),
                seed_topic: Some(TopicId(1)),
                timestamp: None,
                stratum: None,
            })
            .collect();
        ModelState::with_labeled_only(docs, ModelParams::default(), 4, 1).unwrap()
    }

    fn vocab() -> VocabularyIndex {
        VocabularyIndex::from_terms(vec!["schulden".into(), "euro".into(), "haushalt".into(), "banken".into()])
    }

    #[test]
    fn dominant_term_first() {
        let s = state(&[&[0, 0, 1], &[0, 2]]);
        let words = top_words(&s, &vocab(), TopicId(1), 2).unwrap();
        assert_eq!(words[0].term, "schulden");
        assert_eq!(words[0].weight, 4.5);
        assert_eq!(words[1].term, "euro");
    }

    #[test]
    fn ties_and_limits() {
        let s = state(&[&[3, 2, 1, 0]]);
        let all: Vec<String> = top_words(&s, &vocab(), TopicId(1), 10).unwrap().into_iter().map(|w| w.term).collect();
        assert_eq!(all, ["banken", "euro", "haushalt", "schulden"]);
        assert!(top_words(&s, &vocab(), TopicId(1), 0).unwrap().is_empty());
        let partial = state(&[&[1]]);
        let words: Vec<String> = top_words(&partial, &vocab(), TopicId(1), 3).unwrap().into_iter().map(|w| w.term).collect();
        assert_eq!(words, ["euro", "banken", "haushalt"]);
    }
}
