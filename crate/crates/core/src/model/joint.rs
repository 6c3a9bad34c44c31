use super::likelihood::ln;
use super::ModelState;

/// Log joint probability of the current partition and all words,
/// `ln p(z, w | α, β)`, with topic-word distributions integrated out.
///
/// Only occupied topics contribute. The partition term is the Chinese
/// restaurant process probability of the assignments.
pub fn log_joint(state: &ModelState) -> f64 {
    let alpha = state.params().alpha;
    let beta = state.params().beta;
    let vb = state.vocab_size() as f64 * beta;
    let lg_beta = libm::lgamma(beta);
    let lg_vb = libm::lgamma(vb);
    let mut k = 0u64;
    let mut docs = 0u64;
    let mut total = 0.0;
    // Fixed summation order so a restored state gives the same bits.
    let mut topics: Vec<_> = state.topics().iter().collect();
    topics.sort_by_key(|t| t.id());
    for topic in topics {
        let n = topic.doc_count();
        if n == 0 {
            continue;
        }
        k += 1;
        docs += n as u64;
        total += libm::lgamma(n as f64);
        total += lg_vb - libm::lgamma(vb + topic.token_total() as f64);
        for (_, c) in topic.combined_terms() {
            total += libm::lgamma(beta + c as f64) - lg_beta;
        }
    }
    if k == 0 {
        return 0.0;
    }
    total + k as f64 * ln(alpha) + libm::lgamma(alpha) - libm::lgamma(alpha + docs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, TopicId};
    use crate::text::TokenDocument;

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
    fn empty_state_is_zero() {
        let s = ModelState::with_labeled_only(vec![], ModelParams::default(), 2, 1).unwrap();
        assert_eq!(log_joint(&s), 0.0);
    }

    #[test]
    fn single_document_by_hand() {
        let s = ModelState::with_labeled_only(vec![doc("a", &[0], Some(1))], ModelParams::default(), 2, 1)
            .unwrap();
        assert!((log_joint(&s) - 0.5f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn two_documents_by_hand() {
        // [a] and [b] in one topic, V = 2, β = 1.5, α = 1:
        // CRP gives 1/2, words give (1.5/3)·(1.5/4).
        let s = ModelState::with_labeled_only(
            vec![doc("a", &[0], Some(1)), doc("b", &[1], Some(1))],
            ModelParams::default(),
            2,
            1,
        )
        .unwrap();
        let want = (0.5f64 * 0.5 * 1.5 / 4.0).ln();
        assert!((log_joint(&s) - want).abs() < 1e-13);
    }
}
