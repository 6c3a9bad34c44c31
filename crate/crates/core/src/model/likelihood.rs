//! Document likelihoods under a topic, in log space.
//!
//! Both modes are written as `Σ ln(numerator) − Σ ln(denominator)` with integer
//! count arithmetic done before the conversion to floating point. For a
//! one-token document the two modes then perform the same operations and
//! agree bit for bit.

use super::{LikelihoodMode, TopicCounts};

const CACHE_SIZE: usize = 4096;

/// Natural log, evaluated by a portable implementation so results do not
/// depend on the platform's libm.
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Tabulated `ln(c + β)` for small integer `c`.
#[derive(Debug, Clone)]
pub struct LnCache {
    beta: f64,
    table: Vec<f64>,
}

impl LnCache {
    pub fn new(beta: f64) -> Self {
        let table = (0..CACHE_SIZE).map(|c| ln(c as f64 + beta)).collect();
        Self { beta, table }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln(count + β)`.
    #[inline]
    pub fn ln_count(&self, count: u64) -> f64 {
        match self.table.get(count as usize) {
            Some(&v) => v,
            None => ln(count as f64 + self.beta),
        }
    }
}

/// For each token, how many earlier tokens of the document share its term.
pub fn occurrence_ranks(tokens: &[u32]) -> Vec<u32> {
    let mut ranks = Vec::with_capacity(tokens.len());
    for (i, &t) in tokens.iter().enumerate() {
        ranks.push(tokens[..i].iter().filter(|&&u| u == t).count() as u32);
    }
    ranks
}

/// Log likelihood of a document under an existing topic's counts.
///
/// The counts must already exclude the document itself when it is being
/// resampled. `ranks` comes from [`occurrence_ranks`].
///
/// - paper-approximate: `Σ_i ln[(c_{k,w_i} + β) / (N_k + Vβ)]`
/// - exact-collapsed: `Σ_i ln[(c_{k,w_i} + r_i + β) / (N_k + i + Vβ)]`
pub fn doc_likelihood_seeded(
    tokens: &[u32],
    ranks: &[u32],
    topic: &TopicCounts,
    vocab_size: usize,
    cache: &LnCache,
    mode: LikelihoodMode,
) -> f64 {
    debug_assert_eq!(tokens.len(), ranks.len());
    let vbeta = vocab_size as f64 * cache.beta();
    let total = topic.token_total();
    match mode {
        LikelihoodMode::PaperApproximate => {
            let mut num = 0.0;
            for &w in tokens {
                num += cache.ln_count(topic.term_count(w) as u64);
            }
            num - tokens.len() as f64 * ln(total as f64 + vbeta)
        }
        LikelihoodMode::ExactCollapsed => {
            let mut num = 0.0;
            let mut den = 0.0;
            for (i, (&w, &r)) in tokens.iter().zip(ranks).enumerate() {
                num += cache.ln_count(topic.term_count(w) as u64 + r as u64);
                den += ln((total + i as u64) as f64 + vbeta);
            }
            num - den
        }
    }
}

/// Log likelihood of a document under a topic with no documents yet.
///
/// - paper-approximate: `−n_d · ln V`
/// - exact-collapsed: `Π_w Π_{j<m_w} (β + j) / Π_{i<n_d} (Vβ + i)`; the first
///   factor `β / Vβ` is exactly `1/V` and is taken as such.
pub fn doc_likelihood_new(
    ranks: &[u32],
    vocab_size: usize,
    beta: f64,
    mode: LikelihoodMode,
) -> f64 {
    let ln_v = ln(vocab_size as f64);
    match mode {
        LikelihoodMode::PaperApproximate => -(ranks.len() as f64 * ln_v),
        LikelihoodMode::ExactCollapsed => {
            let vbeta = vocab_size as f64 * beta;
            let mut acc = -ln_v;
            for (i, &r) in ranks.iter().enumerate().skip(1) {
                acc += ln(r as f64 + beta) - ln(i as f64 + vbeta);
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TopicId;

    fn topic(tokens: &[u32]) -> TopicCounts {
        let mut t = TopicCounts::new(TopicId(1), true, 1);
        t.add(tokens, 0, true);
        t
    }

    const A: u32 = 0;
    const B: u32 = 1;

    #[test]
    fn seeded_hand_values() {
        let cache = LnCache::new(1.5);
        let t = topic(&[A, A]);
        let got = doc_likelihood_seeded(&[A], &[0], &t, 2, &cache, LikelihoodMode::PaperApproximate);
        assert!((got - (3.5f64 / 5.0).ln()).abs() < 1e-15);
        let empty = TopicCounts::new(TopicId(2), false, 1);
        let got = doc_likelihood_seeded(&[A], &[0], &empty, 2, &cache, LikelihoodMode::PaperApproximate);
        assert!((got - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn single_token_modes_agree_bitwise() {
        let cache = LnCache::new(1.5);
        let t = topic(&[A, B, B, A, A]);
        for w in [A, B, 7] {
            let p = doc_likelihood_seeded(&[w], &[0], &t, 9, &cache, LikelihoodMode::PaperApproximate);
            let e = doc_likelihood_seeded(&[w], &[0], &t, 9, &cache, LikelihoodMode::ExactCollapsed);
            assert_eq!(p.to_bits(), e.to_bits());
        }
        for v in [2, 3, 7, 20_000] {
            for beta in [0.01, 1.5, 3.0] {
                let p = doc_likelihood_new(&[0], v, beta, LikelihoodMode::PaperApproximate);
                let e = doc_likelihood_new(&[0], v, beta, LikelihoodMode::ExactCollapsed);
                assert_eq!(p.to_bits(), e.to_bits());
                assert!((p + (v as f64).ln()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn new_topic_hand_values() {
        let p = doc_likelihood_new(&[0, 0], 4, 1.5, LikelihoodMode::PaperApproximate);
        assert!((p - (1.0f64 / 16.0).ln()).abs() < 1e-15);
        let e = doc_likelihood_new(&occurrence_ranks(&[A, A]), 2, 1.5, LikelihoodMode::ExactCollapsed);
        assert!((e - 0.3125f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exact_mode_matches_polya_product() {
        // doc [a, b, a] against topic {a:2, b:1}, V=3, β=0.5
        let cache = LnCache::new(0.5);
        let t = topic(&[A, A, B]);
        let doc = [A, B, A];
        let got = doc_likelihood_seeded(&doc, &occurrence_ranks(&doc), &t, 3, &cache, LikelihoodMode::ExactCollapsed);
        let want = (2.5 / 4.5) * (1.5 / 5.5) * (3.5 / 6.5f64);
        assert!((got - want.ln()).abs() < 1e-14);
    }

    #[test]
    fn ranks() {
        assert_eq!(occurrence_ranks(&[3, 1, 3, 3, 1]), vec![0, 0, 1, 2, 1]);
    }

    #[test]
    fn cache_falls_back_beyond_table() {
        let cache = LnCache::new(1.5);
        assert_eq!(cache.ln_count(10_000), ln(10_001.5));
        assert_eq!(cache.ln_count(5), ln(6.5));
    }
}
