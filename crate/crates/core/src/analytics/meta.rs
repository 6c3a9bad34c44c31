use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::model::TopicId;
use crate::text::{SeedScheme, TopicKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopicOrigin {
    Seed,
    New,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicMeta {
    pub topic: TopicId,
    pub label: String,
    pub origin: TopicOrigin,
    pub kind: TopicKind,
}

impl TopicMeta {
    pub fn is_new(&self) -> bool {
        self.origin == TopicOrigin::New
    }

    pub fn is_politics(&self) -> bool {
        self.kind == TopicKind::Politics
    }
}

pub fn seed_topic_meta(scheme: &SeedScheme) -> Vec<TopicMeta> {
    scheme
        .labels()
        .iter()
        .map(|l| TopicMeta {
            topic: l.topic,
            label: l.label.clone(),
            origin: TopicOrigin::Seed,
            kind: l.kind,
        })
        .collect()
}

#[derive(Deserialize)]
struct MetaRow {
    topic: u32,
    label: String,
    #[serde(rename = "type")]
    kind: String,
}

/// Reads user-supplied labels: tab-separated `topic  label  type` with a
/// header row; `#` starts a comment line. Entries are marked as new topics
/// until resolved against the seed count.
pub fn load_topic_meta<R: Read>(reader: R) -> Result<Vec<TopicMeta>, AnalyticsError> {
    let mut csv = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for row in csv.deserialize::<MetaRow>() {
        let row = row.map_err(|e| AnalyticsError::Meta(e.to_string()))?;
        let kind = row.kind.parse().map_err(AnalyticsError::Meta)?;
        out.push(TopicMeta {
            topic: TopicId(row.topic),
            label: row.label,
            origin: TopicOrigin::New,
            kind,
        });
    }
    Ok(out)
}

/// Metadata for each retained topic, in the given order. Seed topics fall
/// back to the scheme; every retained new topic needs a user entry.
pub fn resolve_topic_meta(
    retained: &[TopicId],
    seed_topics: usize,
    scheme: &[TopicMeta],
    user: &[TopicMeta],
) -> Result<Vec<TopicMeta>, AnalyticsError> {
    let scheme: HashMap<TopicId, &TopicMeta> = scheme.iter().map(|m| (m.topic, m)).collect();
    let user: HashMap<TopicId, &TopicMeta> = user.iter().map(|m| (m.topic, m)).collect();
    let mut missing = Vec::new();
    let mut out = Vec::with_capacity(retained.len());
    for &t in retained {
        let is_seed = t.0 as usize <= seed_topics;
        match user.get(&t).or_else(|| if is_seed { scheme.get(&t) } else { None }) {
            Some(m) => out.push(TopicMeta {
                topic: t,
                label: m.label.clone(),
                origin: if is_seed { TopicOrigin::Seed } else { TopicOrigin::New },
                kind: m.kind,
            }),
            None if is_seed => out.push(TopicMeta {
                topic: t,
                label: format!("Topic {t}"),
                origin: TopicOrigin::Seed,
                kind: TopicKind::Policy,
            }),
            None => missing.push(t),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(AnalyticsError::MissingTopicMeta(missing))
    }
}
