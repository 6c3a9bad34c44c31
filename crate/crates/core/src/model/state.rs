use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::Serialize;

use super::likelihood::{doc_likelihood_new, doc_likelihood_seeded, ln, occurrence_ranks, LnCache};
use super::{InvariantViolation, ModelError, ModelParams, TopicCounts, TopicId};
use crate::text::TokenDocument;

/// Where to put a detached document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Existing(TopicId),
    New,
}

/// Normalized full conditional over the live topics plus one new-topic slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicDistribution {
    /// Live topics, in state order. The new-topic slot is the extra last entry
    /// of `log_weights` and `probabilities`.
    pub topics: Vec<TopicId>,
    pub log_weights: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl TopicDistribution {
    pub fn new_topic_probability(&self) -> f64 {
        *self.probabilities.last().expect("new-topic slot")
    }

    pub fn probability(&self, topic: TopicId) -> Option<f64> {
        self.topics
            .iter()
            .position(|&t| t == topic)
            .map(|i| self.probabilities[i])
    }
}

/// All sampler state: documents, assignments and per-topic count tables.
///
/// Topics are kept sorted by id: seed topics `1..=K̂` first, then live new
/// topics in creation order. A document whose assignment is `None` is
/// detached, i.e. excluded from every count.
#[derive(Debug, Clone)]
pub struct ModelState {
    params: ModelParams,
    vocab_size: usize,
    seed_topics: usize,
    corpora: Vec<String>,
    docs: Vec<TokenDocument>,
    doc_corpus: Vec<usize>,
    ranks: Vec<Vec<u32>>,
    topics: Vec<TopicCounts>,
    assignments: Vec<Option<TopicId>>,
    next_topic_id: u32,
    cache: LnCache,
    scratch: Vec<f64>,
}

impl ModelState {
    /// Validated state with labeled documents placed and all unlabeled
    /// documents detached.
    pub fn with_labeled_only(
        docs: Vec<TokenDocument>,
        params: ModelParams,
        vocab_size: usize,
        seed_topics: usize,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        let mut seen = HashSet::with_capacity(docs.len());
        let mut corpora: Vec<String> = Vec::new();
        let mut doc_corpus = Vec::with_capacity(docs.len());
        for doc in &docs {
            if !seen.insert(doc.id.as_str()) {
                return Err(ModelError::DuplicateDocument(doc.id.clone()));
            }
            if doc.tokens.is_empty() {
                return Err(ModelError::EmptyDocument(doc.id.clone()));
            }
            if let Some(&term) = doc.tokens.iter().find(|&&t| t as usize >= vocab_size) {
                return Err(InvariantViolation::TermOutOfRange {
                    doc: doc.id.clone(),
                    term,
                    vocab_size,
                }
                .into());
            }
            if let Some(topic) = doc.seed_topic {
                if topic.0 == 0 || topic.0 as usize > seed_topics {
                    return Err(ModelError::SeedOutOfRange {
                        doc: doc.id.clone(),
                        topic,
                        seed_topics,
                    });
                }
            }
            let corpus = match corpora.iter().position(|c| c == &doc.corpus) {
                Some(i) => i,
                None => {
                    corpora.push(doc.corpus.clone());
                    corpora.len() - 1
                }
            };
            doc_corpus.push(corpus);
        }
        let topics = (1..=seed_topics as u32)
            .map(|k| TopicCounts::new(TopicId(k), true, corpora.len()))
            .collect();
        let ranks = docs.iter().map(|d| occurrence_ranks(&d.tokens)).collect();
        let mut state = Self {
            cache: LnCache::new(params.beta),
            params,
            vocab_size,
            seed_topics,
            corpora,
            assignments: vec![None; docs.len()],
            docs,
            doc_corpus,
            ranks,
            topics,
            next_topic_id: seed_topics as u32 + 1,
            scratch: Vec::new(),
        };
        for i in 0..state.docs.len() {
            if let Some(seed) = state.docs[i].seed_topic {
                state.place(i, seed);
            }
        }
        Ok(state)
    }

    /// Labeled documents go to their seeds; unlabeled documents are placed one
    /// at a time, in insertion order, by sampling from the conditional given
    /// every document placed before them.
    pub fn initialize<R: Rng + ?Sized>(
        docs: Vec<TokenDocument>,
        params: ModelParams,
        vocab_size: usize,
        seed_topics: usize,
        rng: &mut R,
    ) -> Result<Self, ModelError> {
        let mut state = Self::with_labeled_only(docs, params, vocab_size, seed_topics)?;
        for i in 0..state.docs.len() {
            if state.assignments[i].is_none() {
                state.resample(i, rng)?;
            }
        }
        Ok(state)
    }

    /// Rebuilds a state by replaying known assignments (document id → topic).
    ///
    /// Documents missing from `assignments` stay detached. `next_topic_id`
    /// must exceed every new-topic id in use.
    pub fn replay(
        docs: Vec<TokenDocument>,
        params: ModelParams,
        vocab_size: usize,
        seed_topics: usize,
        assignments: &HashMap<String, TopicId>,
        next_topic_id: u32,
    ) -> Result<Self, ModelError> {
        let mut state = Self::with_labeled_only(docs, params, vocab_size, seed_topics)?;
        let mut new_ids: Vec<TopicId> = assignments
            .values()
            .copied()
            .filter(|t| t.0 as usize > seed_topics)
            .collect();
        new_ids.sort_unstable();
        new_ids.dedup();
        if let Some(&max) = new_ids.last() {
            if max.0 >= next_topic_id {
                return Err(ModelError::Persist(format!(
                    "topic {max} is not below next topic id {next_topic_id}"
                )));
            }
        }
        let corpora = state.corpora.len();
        for id in new_ids {
            state.topics.push(TopicCounts::new(id, false, corpora));
        }
        state.next_topic_id = next_topic_id.max(seed_topics as u32 + 1);
        for i in 0..state.docs.len() {
            let Some(&topic) = assignments.get(&state.docs[i].id) else {
                continue;
            };
            match state.docs[i].seed_topic {
                Some(seed) if seed != topic => {
                    return Err(InvariantViolation::SeedMoved {
                        doc: state.docs[i].id.clone(),
                        seed,
                        found: topic,
                    }
                    .into())
                }
                Some(_) => {}
                None => {
                    if topic.0 == 0 {
                        return Err(ModelError::NoSuchTopic(topic));
                    }
                    state.place(i, topic);
                }
            }
        }
        Ok(state)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn seed_topic_count(&self) -> usize {
        self.seed_topics
    }

    pub fn next_topic_id(&self) -> u32 {
        self.next_topic_id
    }

    /// Corpus tags in order of first appearance among the documents.
    pub fn corpora(&self) -> &[String] {
        &self.corpora
    }

    pub fn corpus_index(&self, tag: &str) -> Option<usize> {
        self.corpora.iter().position(|c| c == tag)
    }

    pub fn docs(&self) -> &[TokenDocument] {
        &self.docs
    }

    pub fn doc_corpus(&self, doc: usize) -> usize {
        self.doc_corpus[doc]
    }

    pub fn topics(&self) -> &[TopicCounts] {
        &self.topics
    }

    pub fn topic(&self, id: TopicId) -> Option<&TopicCounts> {
        self.topic_index(id).map(|i| &self.topics[i])
    }

    /// Live topics (seed topics always count as live).
    pub fn topic_count(&self) -> usize {
        self.topics.len()
    }

    pub fn new_topic_count(&self) -> usize {
        self.topics.len() - self.seed_topics
    }

    pub fn assignment(&self, doc: usize) -> Option<TopicId> {
        self.assignments[doc]
    }

    pub fn assignments(&self) -> &[Option<TopicId>] {
        &self.assignments
    }

    /// Stored (topic, term) count entries across all topics.
    pub fn nonzero_entries(&self) -> usize {
        self.topics.iter().map(TopicCounts::nonzero_entries).sum()
    }

    fn topic_index(&self, id: TopicId) -> Option<usize> {
        self.topics.binary_search_by_key(&id, |t| t.id()).ok()
    }

    fn check_unlabeled(&self, doc: usize) -> Result<(), ModelError> {
        let d = self.docs.get(doc).ok_or(ModelError::NoSuchDocument(doc))?;
        if d.is_labeled() {
            return Err(ModelError::LabeledDocument(d.id.clone()));
        }
        Ok(())
    }

    /// Adds `doc` to an existing topic without checks.
    fn place(&mut self, doc: usize, topic: TopicId) {
        let idx = self.topic_index(topic).expect("placing into a live topic");
        let labeled = self.docs[doc].is_labeled();
        self.topics[idx].add(&self.docs[doc].tokens, self.doc_corpus[doc], labeled);
        self.assignments[doc] = Some(topic);
    }

    /// Removes an unlabeled document from its topic. An emptied new topic is
    /// deleted immediately.
    pub fn detach(&mut self, doc: usize) -> Result<TopicId, ModelError> {
        self.check_unlabeled(doc)?;
        let topic = self.assignments[doc]
            .ok_or_else(|| ModelError::Detached(self.docs[doc].id.clone()))?;
        let idx = self.topic_index(topic).expect("assigned topic is live");
        self.topics[idx].remove(&self.docs[doc].tokens, self.doc_corpus[doc], false);
        if self.topics[idx].doc_count() == 0 && !self.topics[idx].is_seed() {
            self.topics.remove(idx);
        }
        self.assignments[doc] = None;
        Ok(topic)
    }

    /// Places a detached unlabeled document.
    pub fn attach(&mut self, doc: usize, placement: Placement) -> Result<TopicId, ModelError> {
        self.check_unlabeled(doc)?;
        if self.assignments[doc].is_some() {
            return Err(ModelError::Attached(self.docs[doc].id.clone()));
        }
        let topic = match placement {
            Placement::Existing(id) => {
                if self.topic_index(id).is_none() {
                    return Err(ModelError::NoSuchTopic(id));
                }
                id
            }
            Placement::New => self.open_topic(),
        };
        self.place(doc, topic);
        Ok(topic)
    }

    fn open_topic(&mut self) -> TopicId {
        let id = TopicId(self.next_topic_id);
        self.next_topic_id += 1;
        self.topics
            .push(TopicCounts::new(id, false, self.corpora.len()));
        id
    }

    fn fill_log_weights(&self, tokens: &[u32], ranks: &[u32], out: &mut Vec<f64>) {
        out.clear();
        let mode = self.params.likelihood_mode;
        for topic in &self.topics {
            let n = topic.doc_count();
            if n == 0 {
                out.push(f64::NEG_INFINITY);
                continue;
            }
            let lik = doc_likelihood_seeded(tokens, ranks, topic, self.vocab_size, &self.cache, mode);
            out.push(ln(n as f64) + lik);
        }
        let new = doc_likelihood_new(ranks, self.vocab_size, self.params.beta, mode);
        out.push(ln(self.params.alpha) + new);
    }

    /// Full conditional for an arbitrary token sequence against the current
    /// counts (the sequence itself is not part of the counts).
    pub fn conditional_for_tokens(&self, tokens: &[u32]) -> Result<TopicDistribution, ModelError> {
        if let Some(&term) = tokens.iter().find(|&&t| t as usize >= self.vocab_size) {
            return Err(InvariantViolation::TermOutOfRange {
                doc: "<query>".into(),
                term,
                vocab_size: self.vocab_size,
            }
            .into());
        }
        let ranks = occurrence_ranks(tokens);
        let mut log_weights = Vec::with_capacity(self.topics.len() + 1);
        self.fill_log_weights(tokens, &ranks, &mut log_weights);
        let probabilities = normalize_log_weights(&log_weights);
        Ok(TopicDistribution {
            topics: self.topics.iter().map(TopicCounts::id).collect(),
            log_weights,
            probabilities,
        })
    }

    /// Full conditional of a detached unlabeled document.
    pub fn conditional_topic_distribution(&self, doc: usize) -> Result<TopicDistribution, ModelError> {
        self.check_unlabeled(doc)?;
        if self.assignments[doc].is_some() {
            return Err(ModelError::Attached(self.docs[doc].id.clone()));
        }
        self.conditional_for_tokens(&self.docs[doc].tokens)
    }

    /// Log likelihood of a document under a topic. With `exclude_doc`, a
    /// document currently in that topic is scored against the counts without it.
    pub fn doc_likelihood(&self, doc: usize, topic: TopicId, exclude_doc: bool) -> Result<f64, ModelError> {
        let d = self.docs.get(doc).ok_or(ModelError::NoSuchDocument(doc))?;
        let t = self.topic(topic).ok_or(ModelError::NoSuchTopic(topic))?;
        let mode = self.params.likelihood_mode;
        if exclude_doc && self.assignments[doc] == Some(topic) {
            let mut reduced = t.clone();
            reduced.remove(&d.tokens, self.doc_corpus[doc], d.is_labeled());
            Ok(doc_likelihood_seeded(&d.tokens, &self.ranks[doc], &reduced, self.vocab_size, &self.cache, mode))
        } else {
            Ok(doc_likelihood_seeded(&d.tokens, &self.ranks[doc], t, self.vocab_size, &self.cache, mode))
        }
    }

    /// Removes an unlabeled document (if placed), draws a topic from its full
    /// conditional and places it there. Returns `(previous, drawn)`.
    pub fn resample<R: Rng + ?Sized>(
        &mut self,
        doc: usize,
        rng: &mut R,
    ) -> Result<(Option<TopicId>, TopicId), ModelError> {
        self.check_unlabeled(doc)?;
        let previous = match self.assignments[doc] {
            Some(_) => Some(self.detach(doc)?),
            None => None,
        };
        let mut weights = std::mem::take(&mut self.scratch);
        self.fill_log_weights(&self.docs[doc].tokens, &self.ranks[doc], &mut weights);
        let slot = draw_from_log_weights(&mut weights, rng.random::<f64>());
        self.scratch = weights;
        let topic = if slot == self.topics.len() {
            self.open_topic()
        } else {
            self.topics[slot].id()
        };
        self.place(doc, topic);
        Ok((previous, topic))
    }

    /// Rebuilds every count table from the assignments and compares.
    pub fn verify_counts(&self) -> Result<(), InvariantViolation> {
        for w in self.topics.windows(2) {
            if w[0].id() >= w[1].id() {
                return Err(InvariantViolation::TopicOrder(w[1].id()));
            }
        }
        let mut fresh: Vec<TopicCounts> = self
            .topics
            .iter()
            .map(|t| TopicCounts::new(t.id(), t.is_seed(), self.corpora.len()))
            .collect();
        let mut docs_assigned = 0u64;
        let mut tokens_assigned = 0u64;
        for (i, doc) in self.docs.iter().enumerate() {
            let Some(topic) = self.assignments[i] else {
                continue;
            };
            if let Some(seed) = doc.seed_topic {
                if seed != topic {
                    return Err(InvariantViolation::SeedMoved {
                        doc: doc.id.clone(),
                        seed,
                        found: topic,
                    });
                }
            }
            let idx = self.topic_index(topic).ok_or_else(|| InvariantViolation::DanglingAssignment {
                doc: doc.id.clone(),
                topic,
            })?;
            fresh[idx].add(&doc.tokens, self.doc_corpus[i], doc.is_labeled());
            docs_assigned += 1;
            tokens_assigned += doc.tokens.len() as u64;
        }
        for (kept, recount) in self.topics.iter().zip(&fresh) {
            if let Err(detail) = kept.self_consistent() {
                return Err(InvariantViolation::CountMismatch {
                    topic: kept.id(),
                    detail,
                });
            }
            if kept != recount {
                return Err(InvariantViolation::CountMismatch {
                    topic: kept.id(),
                    detail: format!(
                        "held {} docs/{} tokens, recount {} docs/{} tokens",
                        kept.doc_count(),
                        kept.token_total(),
                        recount.doc_count(),
                        recount.token_total()
                    ),
                });
            }
            if !kept.is_seed() && kept.doc_count() == 0 {
                return Err(InvariantViolation::EmptyNewTopic(kept.id()));
            }
        }
        let held_docs: u64 = self.topics.iter().map(|t| t.doc_count() as u64).sum();
        if held_docs != docs_assigned {
            return Err(InvariantViolation::DocumentConservation {
                held: held_docs,
                expected: docs_assigned,
            });
        }
        let held_tokens: u64 = self.topics.iter().map(TopicCounts::token_total).sum();
        if held_tokens != tokens_assigned {
            return Err(InvariantViolation::TokenConservation {
                held: held_tokens,
                expected: tokens_assigned,
            });
        }
        Ok(())
    }

    /// Deliberately breaks one count table; used by fault-injection checks.
    #[doc(hidden)]
    pub fn inject_count_fault(&mut self) {
        if let Some(t) = self.topics.first_mut() {
            t.corrupt_for_testing();
        }
    }
}

/// Max-shifted normalization of log weights.
pub(crate) fn normalize_log_weights(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_weights.iter().map(|&lw| libm::exp(lw - max)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Turns log weights into unnormalized weights in place and picks the slot
/// whose cumulative mass first exceeds `u · total`.
fn draw_from_log_weights(weights: &mut [f64], u: f64) -> usize {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for w in weights.iter_mut() {
        *w = libm::exp(*w - max);
        total += *w;
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if target < acc {
                return i;
            }
        }
    }
    last_positive
}
