use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{AnalyticsError, SalienceTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spearman {
    pub rho: f64,
    /// Two-sided p-value from the t approximation with `n - 2` degrees of freedom.
    pub p_value: f64,
    /// Two-sided permutation p-value, computed for `n <= 10`.
    pub exact_p_value: Option<f64>,
    pub n: usize,
}

/// Average ranks (1-based); ties share the mean of their positions.
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn t_p_value(rho: f64, n: usize) -> f64 {
    if n < 3 {
        return f64::NAN;
    }
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Share of all `n!` rearrangements of `ry` whose |rho| reaches the observed one.
fn permutation_p_value(rx: &[f64], ry: &[f64], observed: f64) -> f64 {
    let mut perm = ry.to_vec();
    let n = perm.len();
    let mut c = vec![0usize; n];
    let tol = 1e-12;
    let mut hits = u64::from(pearson(rx, &perm).abs() >= observed.abs() - tol);
    let mut total = 1u64;
    let mut i = 0;
    // Heap's algorithm
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += 1;
            hits += u64::from(pearson(rx, &perm).abs() >= observed.abs() - tol);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

/// Spearman's rank correlation with average ranks for ties.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<Spearman, AnalyticsError> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(AnalyticsError::TooFewObservations { needed: 3, got: n });
    }
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if constant(x) || constant(y) {
        return Err(AnalyticsError::ConstantInput);
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let rho = pearson(&rx, &ry);
    Ok(Spearman {
        rho,
        p_value: t_p_value(rho, n),
        exact_p_value: (n <= 10).then(|| permutation_p_value(&rx, &ry, rho)),
        n,
    })
}

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationCell {
    pub a: String,
    pub b: String,
    pub rho: Option<f64>,
    pub p_value: Option<f64>,
    pub n: usize,
    pub stars: String,
    /// Why `rho` is missing, when it is.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub corpora: Vec<String>,
    /// Row-major `corpora × corpora`, diagonal included.
    pub cells: Vec<CorrelationCell>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: usize, b: usize) -> &CorrelationCell {
        &self.cells[a * self.corpora.len() + b]
    }
}

/// Spearman correlations of salience between all corpus pairs. Pairs with a
/// labeled corpus use seed topics only; other pairs use every retained topic.
pub fn rank_correlation_matrix(table: &SalienceTable) -> CorrelationMatrix {
    let c = table.corpora.len();
    let mut cells = Vec::with_capacity(c * c);
    for a in 0..c {
        for b in 0..c {
            let seeds_only = table.corpus_labeled[a] || table.corpus_labeled[b];
            let rows: Vec<usize> = (0..table.topics.len())
                .filter(|&k| !seeds_only || table.topic_is_seed[k])
                .collect();
            let x: Option<Vec<f64>> = rows.iter().map(|&k| table.percent[k][a]).collect();
            let y: Option<Vec<f64>> = rows.iter().map(|&k| table.percent[k][b]).collect();
            let mut cell = CorrelationCell {
                a: table.corpora[a].clone(),
                b: table.corpora[b].clone(),
                rho: None,
                p_value: None,
                n: rows.len(),
                stars: String::new(),
                note: None,
            };
            match (x, y) {
                (Some(x), Some(y)) => match spearman_rho(&x, &y) {
                    Ok(s) => {
                        cell.stars = significance_stars(s.p_value).to_string();
                        cell.rho = Some(s.rho);
                        cell.p_value = Some(s.p_value);
                    }
                    Err(e) => cell.note = Some(e.to_string()),
                },
                _ => cell.note = Some("salience undefined for this corpus".into()),
            }
            cells.push(cell);
        }
    }
    CorrelationMatrix {
        corpora: table.corpora.clone(),
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_fixtures() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(spearman_rho(&a, &a).unwrap().rho, 1.0);
        assert_eq!(spearman_rho(&a, &[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap().rho, -1.0);
        let s = spearman_rho(&a, &[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        assert!((s.rho - 0.8).abs() < 1e-12);
        // 8 of the 120 orderings reach rho >= 0.8 and 8 reach rho <= -0.8
        assert!((s.exact_p_value.unwrap() - 16.0 / 120.0).abs() < 1e-12);
        // t approximation: t = 0.8·sqrt(3/0.36) = 2.3094, p ≈ 0.1041
        assert!((s.p_value - 0.104_088).abs() < 1e-5);
    }

    #[test]
    fn ties_use_average_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 20.0, 5.0]), vec![2.0, 3.5, 3.5, 1.0]);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(AnalyticsError::ConstantInput));
        assert!(matches!(spearman_rho(&[1.0, 2.0], &[1.0, 2.0]), Err(AnalyticsError::TooFewObservations { .. })));
        assert!(matches!(spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 2.0]), Err(AnalyticsError::LengthMismatch(3, 2))));
    }

    proptest! {
        #[test]
        fn monotone_transform_invariance(v in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..30)) {
            let x: Vec<f64> = v.iter().map(|p| p.0).collect();
            let y: Vec<f64> = v.iter().map(|p| p.1).collect();
            if let Ok(s) = spearman_rho(&x, &y) {
                let tx: Vec<f64> = x.iter().map(|a| (a / 10.0).exp()).collect();
                let ty: Vec<f64> = y.iter().map(|b| b * 3.0 - 7.0).collect();
                let t = spearman_rho(&tx, &ty).unwrap();
                prop_assert!((s.rho - t.rho).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&s.rho));
            }
        }
    }
}
