use std::collections::HashMap;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::model::{ModelParams, TopicId};
use crate::text::TokenDocument;

/// Largest number of canonical assignment vectors the enumerator accepts.
pub const MAX_ASSIGNMENTS: u64 = 1_000_000;

/// Topic label of one unlabeled document with new topics numbered by first
/// appearance, so vectors that differ only by new-topic ids coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CanonicalLabel {
    Seed(u32),
    New(u32),
}

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("{count} canonical assignments exceed the limit of {limit}")]
    TooLarge { count: u64, limit: u64 },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// Canonical form of the assignments of the unlabeled documents.
pub fn canonicalize(assignments: &[TopicId], seed_topics: usize) -> Vec<CanonicalLabel> {
    let mut seen: Vec<TopicId> = Vec::new();
    assignments
        .iter()
        .map(|&t| {
            if t.0 as usize <= seed_topics {
                CanonicalLabel::Seed(t.0)
            } else if let Some(i) = seen.iter().position(|&s| s == t) {
                CanonicalLabel::New(i as u32)
            } else {
                seen.push(t);
                CanonicalLabel::New(seen.len() as u32 - 1)
            }
        })
        .collect()
}

/// Exact posterior over canonical assignment vectors of the unlabeled
/// documents (in input order).
#[derive(Debug, Clone, Serialize)]
pub struct EnumeratedPosterior {
    pub unlabeled: Vec<String>,
    pub outcomes: Vec<(Vec<CanonicalLabel>, f64)>,
}

impl EnumeratedPosterior {
    pub fn probability(&self, labels: &[CanonicalLabel]) -> f64 {
        self.outcomes
            .iter()
            .find(|(l, _)| l.as_slice() == labels)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn as_map(&self) -> HashMap<Vec<CanonicalLabel>, f64> {
        self.outcomes.iter().cloned().collect()
    }

    /// Marginal over the label of the `i`-th unlabeled document.
    pub fn marginal(&self, i: usize) -> Vec<(CanonicalLabel, f64)> {
        let mut m: HashMap<CanonicalLabel, f64> = HashMap::new();
        for (labels, p) in &self.outcomes {
            *m.entry(labels[i]).or_default() += p;
        }
        let mut v: Vec<_> = m.into_iter().collect();
        v.sort_by_key(|(l, _)| *l);
        v
    }

    /// Total-variation distance to an empirical distribution.
    pub fn total_variation(&self, counts: &HashMap<Vec<CanonicalLabel>, u64>) -> f64 {
        let n = counts.values().sum::<u64>() as f64;
        let exact = self.as_map();
        let mut tv: f64 = exact
            .iter()
            .map(|(labels, p)| (p - counts.get(labels).copied().unwrap_or(0) as f64 / n).abs())
            .sum();
        tv += counts
            .iter()
            .filter(|(labels, _)| !exact.contains_key(*labels))
            .map(|(_, &c)| c as f64 / n)
            .sum::<f64>();
        0.5 * tv
    }
}

struct Topic {
    docs: u64,
    tokens: u64,
    terms: HashMap<u32, u64>,
}

impl Topic {
    fn empty() -> Self {
        Self {
            docs: 0,
            tokens: 0,
            terms: HashMap::new(),
        }
    }

    fn add(&mut self, tokens: &[u32]) {
        self.docs += 1;
        self.tokens += tokens.len() as u64;
        for &t in tokens {
            *self.terms.entry(t).or_default() += 1;
        }
    }
}

/// Closed-form collapsed joint of a complete configuration.
fn ln_joint(topics: &[Topic], alpha: f64, beta: f64, vocab_size: usize) -> f64 {
    let vb = vocab_size as f64 * beta;
    let occupied: Vec<&Topic> = topics.iter().filter(|t| t.docs > 0).collect();
    let d: u64 = occupied.iter().map(|t| t.docs).sum();
    let mut total = occupied.len() as f64 * alpha.ln() + ln_gamma(alpha) - ln_gamma(alpha + d as f64);
    for t in occupied {
        total += ln_gamma(t.docs as f64);
        total += ln_gamma(vb) - ln_gamma(vb + t.tokens as f64);
        for &c in t.terms.values() {
            total += ln_gamma(beta + c as f64) - ln_gamma(beta);
        }
    }
    total
}

fn count_canonical(docs: usize, seeds: usize, opened: usize, memo: &mut HashMap<(usize, usize), u64>) -> u64 {
    if docs == 0 {
        return 1;
    }
    if let Some(&c) = memo.get(&(docs, opened)) {
        return c;
    }
    let stay = count_canonical(docs - 1, seeds, opened, memo).saturating_mul((seeds + opened) as u64);
    let c = stay.saturating_add(count_canonical(docs - 1, seeds, opened + 1, memo));
    memo.insert((docs, opened), c);
    c
}

/// Enumerates every canonical assignment of the unlabeled documents and
/// normalizes the exact collapsed joint. Labeled documents stay on their
/// seeds; seed topics without labeled documents are unreachable for the
/// sampler and are excluded here too.
pub fn enumerate_exact_posterior(
    docs: &[TokenDocument],
    params: &ModelParams,
    vocab_size: usize,
    seed_topics: usize,
) -> Result<EnumeratedPosterior, EnumerationError> {
    let mut seeds: Vec<Topic> = (0..seed_topics).map(|_| Topic::empty()).collect();
    let mut unlabeled = Vec::new();
    for d in docs {
        if d.tokens.iter().any(|&t| t as usize >= vocab_size) {
            return Err(EnumerationError::Invalid(format!("document {:?} has a term id >= V", d.id)));
        }
        match d.seed_topic {
            Some(k) if k.0 >= 1 && k.0 as usize <= seed_topics => seeds[k.0 as usize - 1].add(&d.tokens),
            Some(k) => return Err(EnumerationError::Invalid(format!("seed {k} outside 1..={seed_topics}"))),
            None => unlabeled.push(d),
        }
    }
    let reachable: Vec<u32> = (1..=seed_topics as u32).filter(|&k| seeds[k as usize - 1].docs > 0).collect();
    let count = count_canonical(unlabeled.len(), reachable.len(), 0, &mut HashMap::new());
    if count > MAX_ASSIGNMENTS {
        return Err(EnumerationError::TooLarge {
            count,
            limit: MAX_ASSIGNMENTS,
        });
    }

    let mut outcomes: Vec<(Vec<CanonicalLabel>, f64)> = Vec::with_capacity(count as usize);
    let mut labels = Vec::with_capacity(unlabeled.len());
    let mut visit = |labels: &[CanonicalLabel]| {
        let mut news: Vec<Topic> = Vec::new();
        let mut topics: Vec<Topic> = seeds
            .iter()
            .map(|s| Topic {
                docs: s.docs,
                tokens: s.tokens,
                terms: s.terms.clone(),
            })
            .collect();
        for (doc, label) in unlabeled.iter().zip(labels) {
            match *label {
                CanonicalLabel::Seed(k) => topics[k as usize - 1].add(&doc.tokens),
                CanonicalLabel::New(j) => {
                    if j as usize == news.len() {
                        news.push(Topic::empty());
                    }
                    news[j as usize].add(&doc.tokens);
                }
            }
        }
        topics.extend(news);
        outcomes.push((labels.to_vec(), ln_joint(&topics, params.alpha, params.beta, vocab_size)));
    };
    fn recurse(
        depth: usize,
        total: usize,
        opened: u32,
        reachable: &[u32],
        labels: &mut Vec<CanonicalLabel>,
        visit: &mut dyn FnMut(&[CanonicalLabel]),
    ) {
        if depth == total {
            visit(labels);
            return;
        }
        let options = reachable
            .iter()
            .map(|&k| CanonicalLabel::Seed(k))
            .chain((0..=opened).map(CanonicalLabel::New));
        for label in options {
            labels.push(label);
            let next = if label == CanonicalLabel::New(opened) { opened + 1 } else { opened };
            recurse(depth + 1, total, next, reachable, labels, visit);
            labels.pop();
        }
    }
    recurse(0, unlabeled.len(), 0, &reachable, &mut labels, &mut visit);

    let max = outcomes.iter().map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = outcomes.iter().map(|(_, l)| (l - max).exp()).sum();
    for (_, l) in outcomes.iter_mut() {
        *l = (*l - max).exp() / z;
    }
    Ok(EnumeratedPosterior {
        unlabeled: unlabeled.iter().map(|d| d.id.clone()).collect(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use CanonicalLabel::{New, Seed};

    fn doc(id: &str, tokens: &[u32], seed: Option<u32>) -> TokenDocument {
        TokenDocument {
            id: id.into(),
            corpus: "c".into(),
            tokens: tokens.to_vec(),
            seed_topic: seed.map(TopicId),
            timestamp: None,
            stratum: None,
        }
    }

    #[test]
    fn two_singletons_by_hand() {
        // Seed holds [a]; unlabeled [a] and [b]; α = 1, β = 1.5, V = 2.
        let docs = [doc("g", &[0], Some(1)), doc("x", &[0], None), doc("y", &[1], None)];
        let post = enumerate_exact_posterior(&docs, &ModelParams::default(), 2, 1).unwrap();
        assert_eq!(post.outcomes.len(), 5);
        let want = [
            (vec![Seed(1), Seed(1)], 2.0 / 7.0),
            (vec![Seed(1), New(0)], 5.0 / 21.0),
            (vec![New(0), Seed(1)], 1.0 / 7.0),
            (vec![New(0), New(0)], 1.0 / 7.0),
            (vec![New(0), New(1)], 4.0 / 21.0),
        ];
        for (labels, p) in want {
            assert!((post.probability(&labels) - p).abs() < 1e-12, "{labels:?}");
        }
    }

    #[test]
    fn no_unlabeled_documents() {
        let post = enumerate_exact_posterior(&[doc("g", &[0], Some(1))], &ModelParams::default(), 2, 1).unwrap();
        assert_eq!(post.outcomes, vec![(vec![], 1.0)]);
    }

    #[test]
    fn refuses_large_instances() {
        let docs: Vec<TokenDocument> = (0..14).map(|i| doc(&format!("d{i}"), &[0], None)).collect();
        assert!(matches!(
            enumerate_exact_posterior(&docs, &ModelParams::default(), 2, 0),
            Err(EnumerationError::TooLarge { .. })
        ));
    }

    #[test]
    fn counts_are_bell_numbers_without_seeds() {
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52)] {
            let docs: Vec<TokenDocument> = (0..n).map(|i| doc(&format!("d{i}"), &[0], None)).collect();
            let post = enumerate_exact_posterior(&docs, &ModelParams::default(), 2, 0).unwrap();
            assert_eq!(post.outcomes.len(), bell);
            let total: f64 = post.outcomes.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn canonical_relabeling() {
        let got = canonicalize(&[TopicId(7), TopicId(1), TopicId(4), TopicId(7)], 2);
        assert_eq!(got, vec![New(0), Seed(1), New(1), New(0)]);
    }
}
