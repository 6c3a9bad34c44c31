use std::collections::HashMap;
use std::hash::Hash;

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index between two labelings of the same items.
///
/// When both partitions are trivial in the same way (the chance-corrected
/// index is 0/0), identical partitions score 1 and anything else 0.
pub fn recovery_score<A: Eq + Hash, B: Eq + Hash>(truth: &[A], inferred: &[B]) -> f64 {
    assert_eq!(truth.len(), inferred.len(), "labelings of different lengths");
    let n = truth.len() as u64;
    let mut table: HashMap<(&A, &B), u64> = HashMap::new();
    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    for (a, b) in truth.iter().zip(inferred) {
        *table.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);
    let expected = if total > 0.0 { sum_a * sum_b / total } else { 0.0 };
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return if table.len() == rows.len() && table.len() == cols.len() { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        assert_eq!(recovery_score(&[0, 0, 1, 1], &[5, 5, 9, 9]), 1.0);
        assert_eq!(recovery_score(&[0, 1, 2, 3], &[0, 0, 0, 0]), 0.0);
        // sklearn: adjusted_rand_score([0,0,1,1],[0,0,1,2]) = 0.5714285714285715
        assert!((recovery_score(&[0, 0, 1, 1], &[0, 0, 1, 2]) - 4.0 / 7.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetric_and_label_invariant(a in prop::collection::vec(0u8..4, 2..40), seed in 0u8..4) {
            let b: Vec<u8> = a.iter().enumerate().map(|(i, &x)| if i % 3 == 0 { seed } else { x }).collect();
            let ab = recovery_score(&a, &b);
            let ba = recovery_score(&b, &a);
            prop_assert!((ab - ba).abs() < 1e-12);
            let relabeled: Vec<u8> = b.iter().map(|&x| 3 - x).collect();
            prop_assert!((recovery_score(&a, &relabeled) - ab).abs() < 1e-12);
            prop_assert!((-1.0..=1.0 + 1e-12).contains(&ab));
            prop_assert_eq!(recovery_score(&a, &a), 1.0);
        }
    }
}
