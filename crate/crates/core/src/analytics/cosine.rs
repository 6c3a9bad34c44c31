use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{column_map, AnalyticsError, TopicMeta};
use crate::model::{ModelState, TopicId};
use crate::{CorpusSet, Medium};

/// Sparse term-count vector sorted by term id.
pub type SparseVector = Vec<(u32, u64)>;

fn to_sparse(map: FxHashMap<u32, u64>) -> SparseVector {
    let mut v: SparseVector = map.into_iter().collect();
    v.sort_unstable();
    v
}

/// Term counts over the documents of one corpus assigned to one topic.
pub fn corpus_topic_vector(state: &ModelState, corpus: &str, topic: TopicId) -> SparseVector {
    let mut acc: FxHashMap<u32, u64> = FxHashMap::default();
    for (doc, a) in state.docs().iter().zip(state.assignments()) {
        if *a == Some(topic) && doc.corpus == corpus {
            for &t in &doc.tokens {
                *acc.entry(t).or_default() += 1;
            }
        }
    }
    to_sparse(acc)
}

/// Every nonzero corpus-topic vector in one pass, keyed by (topic, state
/// corpus index).
pub fn corpus_topic_vectors(state: &ModelState) -> BTreeMap<(TopicId, usize), SparseVector> {
    let mut acc: FxHashMap<(TopicId, usize), FxHashMap<u32, u64>> = FxHashMap::default();
    for (i, (doc, a)) in state.docs().iter().zip(state.assignments()).enumerate() {
        if let Some(topic) = a {
            let cell = acc.entry((*topic, state.doc_corpus(i))).or_default();
            for &t in &doc.tokens {
                *cell.entry(t).or_default() += 1;
            }
        }
    }
    acc.into_iter().map(|(k, v)| (k, to_sparse(v))).collect()
}

/// Cosine of two sparse vectors; `None` if either is zero. Clamped to [0, 1].
pub fn cosine(a: &[(u32, u64)], b: &[(u32, u64)]) -> Option<f64> {
    let norm2 = |v: &[(u32, u64)]| v.iter().map(|&(_, c)| (c as f64) * (c as f64)).sum::<f64>();
    let (na, nb) = (norm2(a), norm2(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 as f64 * b[j].1 as f64;
                i += 1;
                j += 1;
            }
        }
    }
    Some((dot / (na * nb).sqrt()).clamp(0.0, 1.0))
}

/// Cosine of two dense non-negative vectors; `None` if either is zero.
pub fn cosine_dense(a: &[f64], b: &[f64]) -> Option<f64> {
    let na = a.iter().map(|x| x * x).sum::<f64>();
    let nb = b.iter().map(|x| x * x).sum::<f64>();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Some((dot / (na * nb).sqrt()).clamp(0.0, 1.0))
}

/// One (topic, corpus pair) observation with the regression covariates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityCell {
    pub topic: TopicId,
    pub corpus_a: String,
    pub corpus_b: String,
    pub cosine: f64,
    /// Tokens of both corpora within the topic.
    pub token_total: u64,
    pub survey_in_pair: bool,
    pub fbpol_in_pair: bool,
    pub twpol_in_pair: bool,
    pub twaud_in_pair: bool,
    pub same_medium: bool,
    pub same_actor: bool,
    pub topic_is_politics: bool,
    pub topic_is_new: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmittedCell {
    pub topic: TopicId,
    pub corpus_a: String,
    pub corpus_b: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityGrid {
    /// Grouped by topic in `topic_order`, pairs in corpus-set order.
    pub cells: Vec<SimilarityCell>,
    pub omitted: Vec<OmittedCell>,
    /// Topics by decreasing mean cosine (ties by id), with that mean.
    pub topic_order: Vec<(TopicId, Option<f64>)>,
}

/// Cosine similarity of the corpus-topic vectors for every unordered corpus
/// pair and every listed topic. Labeled-corpus cells of new topics are blank
/// by construction and cells with a zero vector are omitted; both are
/// reported in `omitted`.
pub fn cosine_similarity_grid(
    state: &ModelState,
    corpora: &CorpusSet,
    topics: &[TopicMeta],
) -> Result<SimilarityGrid, AnalyticsError> {
    let columns = column_map(state, corpora)?;
    let vectors = corpus_topic_vectors(state);
    let empty = SparseVector::new();
    let specs = corpora.specs();
    let mut per_topic: Vec<(TopicId, Option<f64>, Vec<SimilarityCell>)> = Vec::new();
    let mut omitted = Vec::new();
    for meta in topics {
        if state.topic(meta.topic).is_none() {
            return Err(AnalyticsError::NoSuchTopic(meta.topic));
        }
        let mut cells = Vec::new();
        for (i, j) in corpora.pairs() {
            let (a, b) = (&specs[i], &specs[j]);
            let omit = |reason: &str| OmittedCell {
                topic: meta.topic,
                corpus_a: a.tag.clone(),
                corpus_b: b.tag.clone(),
                reason: reason.to_string(),
            };
            if meta.is_new() && (a.labeled || b.labeled) {
                omitted.push(omit("labeled corpus has no documents in new topics"));
                continue;
            }
            let vec_of = |c: Option<usize>| c.and_then(|c| vectors.get(&(meta.topic, c))).unwrap_or(&empty);
            let (va, vb) = (vec_of(columns[i]), vec_of(columns[j]));
            let Some(cos) = cosine(va, vb) else {
                omitted.push(omit("zero vector"));
                continue;
            };
            let any = |f: &dyn Fn(&crate::CorpusSpec) -> bool| f(a) || f(b);
            cells.push(SimilarityCell {
                topic: meta.topic,
                corpus_a: a.tag.clone(),
                corpus_b: b.tag.clone(),
                cosine: cos,
                token_total: va.iter().chain(vb).map(|&(_, c)| c).sum(),
                survey_in_pair: any(&|c| c.medium == Medium::Survey),
                fbpol_in_pair: any(&|c| c.is_politicians_on(Medium::Facebook)),
                twpol_in_pair: any(&|c| c.is_politicians_on(Medium::Twitter)),
                twaud_in_pair: any(&|c| c.is_audience_on(Medium::Twitter)),
                same_medium: a.medium == b.medium,
                same_actor: a.actor == b.actor,
                topic_is_politics: meta.is_politics(),
                topic_is_new: meta.is_new(),
            });
        }
        let mean = (!cells.is_empty()).then(|| cells.iter().map(|c| c.cosine).sum::<f64>() / cells.len() as f64);
        per_topic.push((meta.topic, mean, cells));
    }
    per_topic.sort_by(|x, y| {
        let key = |m: Option<f64>| m.unwrap_or(f64::NEG_INFINITY);
        key(y.1).total_cmp(&key(x.1)).then(x.0.cmp(&y.0))
    });
    Ok(SimilarityGrid {
        topic_order: per_topic.iter().map(|(t, m, _)| (*t, *m)).collect(),
        cells: per_topic.into_iter().flat_map(|(_, _, c)| c).collect(),
        omitted,
    })
}
