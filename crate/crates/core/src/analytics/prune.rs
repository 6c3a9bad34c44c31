use serde::Serialize;

use super::{column_map, AnalyticsError};
use crate::model::{ModelState, TopicId};
use crate::CorpusSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedTopic {
    pub topic: TopicId,
    pub documents: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneReport {
    /// Smallest labeled-corpus document count over the seed topics.
    pub threshold: u64,
    pub retained: Vec<TopicId>,
    pub dropped: Vec<DroppedTopic>,
    /// Unlabeled-corpus documents that sat in dropped topics.
    pub residual_documents: u64,
    pub unlabeled_documents: u64,
}

/// Drops every new topic whose document total over the unlabeled corpora is
/// strictly below the smallest seed topic's labeled-corpus size.
pub fn prune_topics(state: &ModelState, corpora: &CorpusSet) -> Result<PruneReport, AnalyticsError> {
    column_map(state, corpora)?;
    let labeled: Vec<bool> = state.corpora().iter().map(|c| corpora.is_labeled(c)).collect();
    let split = |per_corpus: &[u32], want_labeled: bool| -> u64 {
        per_corpus
            .iter()
            .zip(&labeled)
            .filter(|(_, &l)| l == want_labeled)
            .map(|(&n, _)| n as u64)
            .sum()
    };
    let threshold = state
        .topics()
        .iter()
        .filter(|t| t.is_seed())
        .map(|t| split(t.per_corpus(), true))
        .min()
        .unwrap_or(0);
    let mut report = PruneReport {
        threshold,
        retained: Vec::new(),
        dropped: Vec::new(),
        residual_documents: 0,
        unlabeled_documents: 0,
    };
    for t in state.topics() {
        let unlabeled = split(t.per_corpus(), false);
        report.unlabeled_documents += unlabeled;
        if !t.is_seed() && unlabeled < threshold {
            report.residual_documents += unlabeled;
            report.dropped.push(DroppedTopic {
                topic: t.id(),
                documents: unlabeled,
            });
        } else {
            report.retained.push(t.id());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, Placement};
    use crate::text::TokenDocument;
    use crate::{Actor, CorpusSpec, Medium};

    fn doc(id: usize, corpus: &str, seed: Option<u32>) -> TokenDocument {
        TokenDocument {
            id: format!("d{id}"),
            corpus: corpus.into(),
            tokens: vec![0],
            seed_topic: seed.map(TopicId),
            timestamp: None,
            stratum: None,
        }
    }

    fn set() -> CorpusSet {
        CorpusSet(vec![
            CorpusSpec::new("s", Medium::Survey, Actor::Respondents, true),
            CorpusSpec::new("m", Medium::Twitter, Actor::Audience, false),
        ])
    }

    #[test]
    fn boundary_is_strict() {
        // seeds of size 3 and 2 => threshold 2; new topics of size 2 and 1
        let mut docs: Vec<TokenDocument> = (0..5).map(|i| doc(i, "s", Some(if i < 3 { 1 } else { 2 }))).collect();
        docs.extend((5..8).map(|i| doc(i, "m", None)));
        let mut state = ModelState::with_labeled_only(docs, ModelParams::default(), 1, 2).unwrap();
        let a = state.attach(5, Placement::New).unwrap();
        state.attach(6, Placement::Existing(a)).unwrap();
        let b = state.attach(7, Placement::New).unwrap();
        let report = prune_topics(&state, &set()).unwrap();
        assert_eq!(report.threshold, 2);
        assert_eq!(report.retained, vec![TopicId(1), TopicId(2), a]);
        assert_eq!(report.dropped, vec![DroppedTopic { topic: b, documents: 1 }]);
        assert_eq!(report.residual_documents, 1);
        assert_eq!(report.unlabeled_documents, 3);
    }

    #[test]
    fn nothing_to_drop_without_new_topics() {
        let docs = vec![doc(0, "s", Some(1)), doc(1, "m", None)];
        let mut state = ModelState::with_labeled_only(docs, ModelParams::default(), 1, 1).unwrap();
        state.attach(1, Placement::Existing(TopicId(1))).unwrap();
        let report = prune_topics(&state, &set()).unwrap();
        assert!(report.dropped.is_empty());
        assert_eq!(report.retained, vec![TopicId(1)]);
    }
}
