use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::io::{write_jsonl, FileHeader, IoError};
use crate::model::TopicId;
use crate::text::{RawRecord, SeedScheme, TokenDocument, VocabularyIndex};

pub const TRUTH_FORMAT: &str = "seedtopic-truth";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCorpusSpec {
    pub tag: String,
    pub docs: usize,
    pub labeled: bool,
}

/// Finite truncation of the generative story: `K̂ + extra` topics,
/// `θ ~ Dir(alpha)`, `φ_k ~ Dir(beta)`, `z ~ Cat(θ)`, words `~ Mult(φ_z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed_topics: usize,
    pub extra_topics: usize,
    pub vocab_size: usize,
    pub corpora: Vec<SyntheticCorpusSpec>,
    /// Document length is `min_length + Poisson(mean_length - min_length)`.
    pub mean_length: f64,
    pub min_length: usize,
    /// Symmetric concentration of the topic popularity θ.
    pub alpha: f64,
    /// Symmetric concentration of every φ_k.
    pub beta: f64,
    /// Degenerate φ: topic `k` emits only term `k - 1`.
    pub disjoint_topics: bool,
    /// Labeled documents draw their seed from θ restricted to the seeds;
    /// otherwise they cycle through the seeds in order.
    #[serde(default)]
    pub labeled_from_theta: bool,
    pub rng_seed: u64,
}

impl SyntheticSpec {
    /// One labeled and one unlabeled corpus.
    pub fn two_corpora(
        seed_topics: usize,
        extra_topics: usize,
        vocab_size: usize,
        labeled: usize,
        unlabeled: usize,
        mean_length: f64,
        rng_seed: u64,
    ) -> Self {
        Self {
            seed_topics,
            extra_topics,
            vocab_size,
            corpora: vec![
                SyntheticCorpusSpec {
                    tag: "labeled".into(),
                    docs: labeled,
                    labeled: true,
                },
                SyntheticCorpusSpec {
                    tag: "unlabeled".into(),
                    docs: unlabeled,
                    labeled: false,
                },
            ],
            mean_length,
            min_length: 1,
            alpha: 1.0,
            beta: 1.5,
            disjoint_topics: false,
            labeled_from_theta: false,
            rng_seed,
        }
    }

    pub fn topic_count(&self) -> usize {
        self.seed_topics + self.extra_topics
    }

    fn validate(&self) -> Result<(), String> {
        if self.topic_count() == 0 || self.vocab_size == 0 {
            return Err("need at least one topic and one term".into());
        }
        if self.min_length == 0 || self.mean_length < self.min_length as f64 {
            return Err("lengths must satisfy 1 <= min_length <= mean_length".into());
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err("alpha and beta must be positive".into());
        }
        if self.corpora.iter().any(|c| c.labeled && c.docs > 0) && self.seed_topics == 0 {
            return Err("labeled documents need seed topics".into());
        }
        if self.disjoint_topics && self.vocab_size < self.topic_count() {
            return Err("disjoint topics need V >= K".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub docs: Vec<TokenDocument>,
    /// True topic of each document, aligned with `docs`. Seeds are `1..=K̂`,
    /// extra topics follow.
    pub truth: Vec<TopicId>,
    pub theta: Vec<f64>,
    /// Topic-word distributions, one row per topic.
    pub phi: Vec<Vec<f64>>,
    pub vocabulary: VocabularyIndex,
}

impl SyntheticCorpus {
    pub fn unlabeled_truth(&self) -> Vec<TopicId> {
        self.docs
            .iter()
            .zip(&self.truth)
            .filter(|(d, _)| !d.is_labeled())
            .map(|(_, t)| *t)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub id: String,
    pub topic: TopicId,
}

fn dirichlet<R: Rng>(k: usize, concentration: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    let mut draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 {
        draws.iter_mut().for_each(|x| *x /= total);
    } else {
        draws.iter_mut().for_each(|x| *x = 1.0 / k as f64);
    }
    draws
}

/// Draws a corpus. Labeled documents cycle through the seed topics so that
/// every seed is represented; unlabeled documents draw their topic from θ.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus, String> {
    spec.validate()?;
    let k = spec.topic_count();
    let v = spec.vocab_size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let theta = dirichlet(k, spec.alpha, &mut rng);
    let phi: Vec<Vec<f64>> = (0..k)
        .map(|topic| {
            if spec.disjoint_topics {
                (0..v).map(|w| if w == topic { 1.0 } else { 0.0 }).collect()
            } else {
                dirichlet(v, spec.beta, &mut rng)
            }
        })
        .collect();
    let phis: Vec<WeightedIndex<f64>> = phi
        .iter()
        .map(|w| WeightedIndex::new(w).expect("nonzero topic-word weights"))
        .collect();
    let topic_draw = WeightedIndex::new(&theta).map_err(|e| e.to_string())?;
    let seed_draw = match spec.seed_topics {
        0 => None,
        k => Some(WeightedIndex::new(&theta[..k]).map_err(|e| e.to_string())?),
    };
    let extra_len = spec.mean_length - spec.min_length as f64;
    let poisson = (extra_len > 0.0).then(|| Poisson::new(extra_len).expect("positive rate"));

    let mut docs = Vec::new();
    let mut truth = Vec::new();
    let mut next_seed = 0;
    for corpus in &spec.corpora {
        for i in 0..corpus.docs {
            let topic = if corpus.labeled && spec.labeled_from_theta {
                seed_draw.as_ref().expect("labeled documents need seed topics").sample(&mut rng) + 1
            } else if corpus.labeled {
                next_seed = (next_seed % spec.seed_topics) + 1;
                next_seed
            } else {
                topic_draw.sample(&mut rng) + 1
            };
            let len = spec.min_length + poisson.as_ref().map_or(0, |p| p.sample(&mut rng) as usize);
            let tokens = (0..len).map(|_| phis[topic - 1].sample(&mut rng) as u32).collect();
            docs.push(TokenDocument {
                id: format!("{}-{i:06}", corpus.tag),
                corpus: corpus.tag.clone(),
                tokens,
                seed_topic: corpus.labeled.then_some(TopicId(topic as u32)),
                timestamp: None,
                stratum: None,
            });
            truth.push(TopicId(topic as u32));
        }
    }
    let vocabulary = VocabularyIndex::from_terms((0..v).map(|w| format!("t{w:05}")).collect());
    Ok(SyntheticCorpus {
        docs,
        truth,
        theta,
        phi,
        vocabulary,
    })
}

/// Letters-only surface form of a synthetic term id: `zq` followed by the id
/// in base 26, at least two letters.
pub fn synthetic_word(id: u32) -> String {
    let mut letters = Vec::new();
    let mut n = id;
    loop {
        letters.push(b'a' + (n % 26) as u8);
        n /= 26;
        if n == 0 && letters.len() >= 2 {
            break;
        }
    }
    letters.reverse();
    format!("zq{}", String::from_utf8(letters).expect("ascii"))
}

/// Raw records for a synthetic corpus. Labeled documents carry the first code
/// the scheme maps to their seed topic; every record gets a day in a 56-day
/// window and one of three strata.
pub fn synthetic_records(corpus: &SyntheticCorpus, scheme: &SeedScheme) -> Result<Vec<RawRecord>, String> {
    let start = chrono::NaiveDate::from_ymd_opt(2013, 8, 1).expect("valid date");
    corpus
        .docs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let seed_code = match d.seed_topic {
                None => None,
                Some(t) => {
                    let p = scheme
                        .patterns()
                        .iter()
                        .find(|p| p.topic == t)
                        .ok_or_else(|| format!("scheme has no pattern for topic {t}"))?;
                    Some(p.pattern.replace('X', "0"))
                }
            };
            Ok(RawRecord {
                id: d.id.clone(),
                text: d.tokens.iter().map(|&w| synthetic_word(w)).collect::<Vec<_>>().join(" "),
                corpus: d.corpus.clone(),
                seed_code,
                timestamp: Some(start + chrono::Days::new((i as u64 * 7) % 56)),
                stratum: Some(format!("s{}", i % 3)),
            })
        })
        .collect()
}

/// Ground-truth sidecar for a synthetic document file.
pub fn write_truth(path: &Path, header: &FileHeader, corpus: &SyntheticCorpus) -> Result<(), IoError> {
    write_jsonl(
        path,
        header,
        corpus.docs.iter().zip(&corpus.truth).map(|(d, &topic)| TruthRecord {
            id: d.id.clone(),
            topic,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_extra_topics_means_seed_truth_only() {
        let spec = SyntheticSpec::two_corpora(4, 0, 50, 40, 400, 6.0, 1);
        let corpus = generate_synthetic(&spec).unwrap();
        assert!(corpus.truth.iter().all(|t| (1..=4).contains(&t.0)));
        assert_eq!(corpus.docs.len(), 440);
        assert!(corpus.docs.iter().all(|d| !d.tokens.is_empty() && d.tokens.iter().all(|&w| w < 50)));
    }

    #[test]
    fn synthetic_words_are_distinct_letters() {
        let words: std::collections::HashSet<String> = (0..2000).map(synthetic_word).collect();
        assert_eq!(words.len(), 2000);
        assert!(words.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
        assert_eq!(synthetic_word(0), "zqaa");
        assert_eq!(synthetic_word(27), "zqbb");
    }

    #[test]
    fn records_round_trip_seed_codes() {
        let scheme = SeedScheme::gles_2013();
        let spec = SyntheticSpec::two_corpora(scheme.topic_count(), 1, 40, 36, 10, 4.0, 3);
        let corpus = generate_synthetic(&spec).unwrap();
        let records = synthetic_records(&corpus, &scheme).unwrap();
        for (r, d) in records.iter().zip(&corpus.docs) {
            assert_eq!(r.seed_code.as_deref().and_then(|c| scheme.assign(c)), d.seed_topic);
            assert_eq!(r.text.split(' ').count(), d.tokens.len());
        }
    }

    #[test]
    fn labeled_from_theta_stays_on_seeds() {
        let mut spec = SyntheticSpec::two_corpora(3, 4, 30, 3000, 10, 4.0, 9);
        spec.labeled_from_theta = true;
        let corpus = generate_synthetic(&spec).unwrap();
        let mut counts = [0usize; 3];
        for d in corpus.docs.iter().filter(|d| d.is_labeled()) {
            counts[d.seed_topic.unwrap().0 as usize - 1] += 1;
        }
        let mass: f64 = corpus.theta[..3].iter().sum();
        for k in 0..3 {
            let want = corpus.theta[k] / mass;
            assert!((counts[k] as f64 / 3000.0 - want).abs() < 0.03, "{counts:?} vs {:?}", corpus.theta);
        }
    }

    #[test]
    fn labeled_docs_carry_true_seed() {
        let spec = SyntheticSpec::two_corpora(3, 2, 30, 30, 10, 4.0, 2);
        let corpus = generate_synthetic(&spec).unwrap();
        for (d, t) in corpus.docs.iter().zip(&corpus.truth) {
            if let Some(seed) = d.seed_topic {
                assert_eq!(seed, *t);
            }
        }
    }

    #[test]
    fn disjoint_topics_use_their_own_terms() {
        let mut spec = SyntheticSpec::two_corpora(2, 1, 30, 10, 100, 5.0, 3);
        spec.disjoint_topics = true;
        let corpus = generate_synthetic(&spec).unwrap();
        for (d, t) in corpus.docs.iter().zip(&corpus.truth) {
            assert!(d.tokens.iter().all(|&w| w == t.0 - 1));
        }
    }

    #[test]
    fn proportions_follow_theta() {
        let spec = SyntheticSpec::two_corpora(3, 2, 20, 0, 50_000, 1.0, 4);
        let corpus = generate_synthetic(&spec).unwrap();
        let mut counts = [0usize; 5];
        for t in &corpus.truth {
            counts[t.0 as usize - 1] += 1;
        }
        for (c, p) in counts.iter().zip(&corpus.theta) {
            assert!((*c as f64 / 50_000.0 - p).abs() < 0.01);
        }
    }

    #[test]
    fn fixed_length_when_mean_equals_minimum() {
        let spec = SyntheticSpec::two_corpora(2, 1, 10, 5, 50, 1.0, 5);
        let corpus = generate_synthetic(&spec).unwrap();
        assert!(corpus.docs.iter().all(|d| d.tokens.len() == 1));
    }
}
