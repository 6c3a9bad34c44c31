use rustc_hash::FxHashMap;

use super::TopicId;

/// Labeled and unlabeled count of one term within a topic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct TermCount {
    labeled: u32,
    unlabeled: u32,
}

/// Sufficient statistics of one topic.
///
/// Term counts are sparse: one map entry per term the topic holds, carrying
/// the labeled and unlabeled counts side by side. Terms with both counts at
/// zero are removed, so memory tracks the number of nonzero (topic, term)
/// pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicCounts {
    id: TopicId,
    is_seed: bool,
    doc_count: u32,
    terms: FxHashMap<u32, TermCount>,
    labeled_total: u64,
    unlabeled_total: u64,
    per_corpus: Vec<u32>,
}

impl TopicCounts {
    pub fn new(id: TopicId, is_seed: bool, corpora: usize) -> Self {
        Self {
            id,
            is_seed,
            doc_count: 0,
            terms: FxHashMap::default(),
            labeled_total: 0,
            unlabeled_total: 0,
            per_corpus: vec![0; corpora],
        }
    }

    pub fn id(&self) -> TopicId {
        self.id
    }

    pub fn is_seed(&self) -> bool {
        self.is_seed
    }

    /// Documents assigned, labeled and unlabeled.
    pub fn doc_count(&self) -> u32 {
        self.doc_count
    }

    /// Combined count of `term` over labeled and unlabeled documents.
    #[inline]
    pub fn term_count(&self, term: u32) -> u32 {
        self.terms.get(&term).map_or(0, |c| c.labeled + c.unlabeled)
    }

    pub fn labeled_term_count(&self, term: u32) -> u32 {
        self.terms.get(&term).map_or(0, |c| c.labeled)
    }

    pub fn unlabeled_term_count(&self, term: u32) -> u32 {
        self.terms.get(&term).map_or(0, |c| c.unlabeled)
    }

    pub fn labeled_tokens(&self) -> u64 {
        self.labeled_total
    }

    pub fn unlabeled_tokens(&self) -> u64 {
        self.unlabeled_total
    }

    pub fn token_total(&self) -> u64 {
        self.labeled_total + self.unlabeled_total
    }

    pub fn per_corpus(&self) -> &[u32] {
        &self.per_corpus
    }

    fn sorted_by(&self, pick: impl Fn(&TermCount) -> u32) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = self
            .terms
            .iter()
            .map(|(&t, c)| (t, pick(c)))
            .filter(|&(_, c)| c > 0)
            .collect();
        v.sort_unstable();
        v
    }

    /// Nonzero labeled counts, sorted by term id.
    pub fn labeled_terms(&self) -> Vec<(u32, u32)> {
        self.sorted_by(|c| c.labeled)
    }

    /// Nonzero unlabeled counts, sorted by term id.
    pub fn unlabeled_terms(&self) -> Vec<(u32, u32)> {
        self.sorted_by(|c| c.unlabeled)
    }

    /// Nonzero combined counts, sorted by term id.
    pub fn combined_terms(&self) -> Vec<(u32, u32)> {
        self.sorted_by(|c| c.labeled + c.unlabeled)
    }

    /// Number of terms with a nonzero count in this topic.
    pub fn nonzero_entries(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn add(&mut self, tokens: &[u32], corpus: usize, labeled: bool) {
        self.doc_count += 1;
        self.per_corpus[corpus] += 1;
        for &t in tokens {
            let c = self.terms.entry(t).or_default();
            if labeled {
                c.labeled += 1;
            } else {
                c.unlabeled += 1;
            }
        }
        if labeled {
            self.labeled_total += tokens.len() as u64;
        } else {
            self.unlabeled_total += tokens.len() as u64;
        }
    }

    pub(crate) fn remove(&mut self, tokens: &[u32], corpus: usize, labeled: bool) {
        debug_assert!(self.doc_count > 0 && self.per_corpus[corpus] > 0);
        self.doc_count -= 1;
        self.per_corpus[corpus] -= 1;
        for &t in tokens {
            let c = self.terms.get_mut(&t).expect("removing a token the topic does not hold");
            let slot = if labeled { &mut c.labeled } else { &mut c.unlabeled };
            *slot = slot.checked_sub(1).expect("removing a token the topic does not hold");
            if c.labeled == 0 && c.unlabeled == 0 {
                self.terms.remove(&t);
            }
        }
        if labeled {
            self.labeled_total -= tokens.len() as u64;
        } else {
            self.unlabeled_total -= tokens.len() as u64;
        }
    }

    /// Rebuilds a topic from persisted tables.
    pub(crate) fn from_parts(
        id: TopicId,
        is_seed: bool,
        doc_count: u32,
        per_corpus: Vec<u32>,
        labeled: &[(u32, u32)],
        unlabeled: &[(u32, u32)],
    ) -> Self {
        let mut terms: FxHashMap<u32, TermCount> = FxHashMap::default();
        for &(t, c) in labeled {
            terms.entry(t).or_default().labeled += c;
        }
        for &(t, c) in unlabeled {
            terms.entry(t).or_default().unlabeled += c;
        }
        terms.retain(|_, c| c.labeled > 0 || c.unlabeled > 0);
        Self {
            id,
            is_seed,
            doc_count,
            labeled_total: labeled.iter().map(|&(_, c)| c as u64).sum(),
            unlabeled_total: unlabeled.iter().map(|&(_, c)| c as u64).sum(),
            terms,
            per_corpus,
        }
    }

    /// Internal consistency of the sums with the sparse map.
    pub fn self_consistent(&self) -> Result<(), String> {
        let l: u64 = self.terms.values().map(|c| c.labeled as u64).sum();
        let u: u64 = self.terms.values().map(|c| c.unlabeled as u64).sum();
        if l != self.labeled_total {
            return Err(format!("labeled total {} != {l}", self.labeled_total));
        }
        if u != self.unlabeled_total {
            return Err(format!("unlabeled total {} != {u}", self.unlabeled_total));
        }
        let docs: u64 = self.per_corpus.iter().map(|&c| c as u64).sum();
        if docs != self.doc_count as u64 {
            return Err(format!("doc count {} != per-corpus sum {docs}", self.doc_count));
        }
        if self.terms.values().any(|c| c.labeled == 0 && c.unlabeled == 0) {
            return Err("stored zero count".into());
        }
        Ok(())
    }

    pub(crate) fn corrupt_for_testing(&mut self) {
        self.unlabeled_total += 1;
    }
}
