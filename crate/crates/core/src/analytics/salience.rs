use serde::Serialize;

use super::{column_map, AnalyticsError};
use crate::model::{ModelState, TopicId};
use crate::CorpusSet;

/// Topic × corpus percentages. A cell is `None` when it is undefined (the
/// corpus has no documents in retained topics) or structurally blank
/// (a labeled corpus against a new topic).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SalienceTable {
    pub corpora: Vec<String>,
    pub corpus_labeled: Vec<bool>,
    pub topics: Vec<TopicId>,
    pub topic_is_seed: Vec<bool>,
    pub counts: Vec<Vec<u64>>,
    pub column_totals: Vec<u64>,
    pub percent: Vec<Vec<Option<f64>>>,
    pub undefined_columns: Vec<String>,
}

impl SalienceTable {
    pub fn column(&self, corpus: usize) -> Vec<Option<f64>> {
        self.percent.iter().map(|row| row[corpus]).collect()
    }

    pub fn column_sum(&self, corpus: usize) -> Option<f64> {
        if self.column_totals[corpus] == 0 {
            return None;
        }
        Some(self.percent.iter().filter_map(|row| row[corpus]).sum())
    }
}

pub fn topic_salience(state: &ModelState, corpora: &CorpusSet, retained: &[TopicId]) -> Result<SalienceTable, AnalyticsError> {
    let columns = column_map(state, corpora)?;
    let mut counts = Vec::with_capacity(retained.len());
    let mut topic_is_seed = Vec::with_capacity(retained.len());
    for &id in retained {
        let t = state.topic(id).ok_or(AnalyticsError::NoSuchTopic(id))?;
        topic_is_seed.push(t.is_seed());
        counts.push(
            columns
                .iter()
                .map(|c| c.map_or(0, |i| t.per_corpus()[i] as u64))
                .collect::<Vec<u64>>(),
        );
    }
    let corpus_labeled: Vec<bool> = corpora.specs().iter().map(|c| c.labeled).collect();
    let column_totals: Vec<u64> = (0..columns.len())
        .map(|j| counts.iter().map(|row| row[j]).sum())
        .collect();
    let percent = counts
        .iter()
        .zip(&topic_is_seed)
        .map(|(row, &seed)| {
            row.iter()
                .enumerate()
                .map(|(j, &n)| {
                    if column_totals[j] == 0 || (corpus_labeled[j] && !seed) {
                        None
                    } else {
                        Some(100.0 * n as f64 / column_totals[j] as f64)
                    }
                })
                .collect()
        })
        .collect();
    let undefined_columns = corpora
        .tags()
        .zip(&column_totals)
        .filter(|(_, &n)| n == 0)
        .map(|(t, _)| t.to_string())
        .collect();
    Ok(SalienceTable {
        corpora: corpora.tags().map(String::from).collect(),
        corpus_labeled,
        topics: retained.to_vec(),
        topic_is_seed,
        counts,
        column_totals,
        percent,
        undefined_columns,
    })
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

    #[test]
    fn hand_counted_table() {
        let set = CorpusSet(vec![
            CorpusSpec::new("s", Medium::Survey, Actor::Respondents, true),
            CorpusSpec::new("m", Medium::Twitter, Actor::Audience, false),
            CorpusSpec::new("e", Medium::Facebook, Actor::Audience, false),
        ]);
        let docs = vec![
            doc(0, "s", Some(1)),
            doc(1, "s", Some(1)),
            doc(2, "s", Some(2)),
            doc(3, "m", None),
            doc(4, "m", None),
            doc(5, "m", None),
            doc(6, "m", None),
        ];
        let mut state = ModelState::with_labeled_only(docs, ModelParams::default(), 1, 2).unwrap();
        state.attach(3, Placement::Existing(TopicId(2))).unwrap();
        let n = state.attach(4, Placement::New).unwrap();
        state.attach(5, Placement::Existing(n)).unwrap();
        state.attach(6, Placement::Existing(TopicId(1))).unwrap();
        let table = topic_salience(&state, &set, &[TopicId(1), TopicId(2), n]).unwrap();
        let s = |v: f64| Some(v);
        assert_eq!(table.column(0), vec![s(200.0 / 3.0), s(100.0 / 3.0), None]);
        assert_eq!(table.column(1), vec![s(25.0), s(25.0), s(50.0)]);
        assert_eq!(table.column(2), vec![None, None, None]);
        assert_eq!(table.undefined_columns, vec!["e".to_string()]);
        assert!((table.column_sum(1).unwrap() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn single_document_corpus() {
        let set = CorpusSet(vec![CorpusSpec::new("m", Medium::Twitter, Actor::Audience, false)]);
        let docs = vec![doc(0, "m", None)];
        let mut state = ModelState::with_labeled_only(docs, ModelParams::default(), 1, 2).unwrap();
        state.attach(0, Placement::Existing(TopicId(2))).unwrap();
        let table = topic_salience(&state, &set, &[TopicId(1), TopicId(2)]).unwrap();
        assert_eq!(table.column(0), vec![Some(0.0), Some(100.0)]);
    }
}
