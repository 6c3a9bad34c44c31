use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub trait Stratified {
    fn stratum(&self) -> Option<&str>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "warning")]
pub enum BalanceWarning {
    /// Pool stratum smaller than the target stratum; the whole stratum was taken.
    Shortfall {
        stratum: String,
        wanted: usize,
        available: usize,
    },
    /// Documents without a stratum value were skipped.
    MissingStratum { target: usize, pool: usize },
    EmptyPool,
}

#[derive(Debug, Clone)]
pub struct BalanceOutcome<T> {
    pub sampled: Vec<T>,
    pub warnings: Vec<BalanceWarning>,
}

/// Samples from `pool`, without replacement, as many documents per stratum as
/// `target` holds in that stratum.
///
/// Strata are visited in lexicographic order from one seeded stream, and
/// sampled documents keep their pool order within a stratum.
pub fn stratified_balance<T: Stratified + Clone>(
    target: &[T],
    pool: &[T],
    seed: u64,
) -> BalanceOutcome<T> {
    let mut warnings = Vec::new();
    let mut wanted: BTreeMap<&str, usize> = BTreeMap::new();
    let mut missing_target = 0;
    for doc in target {
        match doc.stratum() {
            Some(s) => *wanted.entry(s).or_default() += 1,
            None => missing_target += 1,
        }
    }
    let mut available: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut missing_pool = 0;
    for (i, doc) in pool.iter().enumerate() {
        match doc.stratum() {
            Some(s) => available.entry(s).or_default().push(i),
            None => missing_pool += 1,
        }
    }
    if missing_target + missing_pool > 0 {
        log::warn!(
            "stratified sampling skipped {missing_target} target and {missing_pool} pool documents without stratum"
        );
        warnings.push(BalanceWarning::MissingStratum {
            target: missing_target,
            pool: missing_pool,
        });
    }
    if pool.is_empty() {
        log::warn!("stratified sampling from an empty pool");
        warnings.push(BalanceWarning::EmptyPool);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = Vec::new();
    for (stratum, &want) in &wanted {
        let members = available.get(stratum).map(Vec::as_slice).unwrap_or(&[]);
        if members.len() < want {
            if !pool.is_empty() {
                log::warn!(
                    "stratum {stratum:?}: wanted {want}, pool has only {}",
                    members.len()
                );
            }
            warnings.push(BalanceWarning::Shortfall {
                stratum: stratum.to_string(),
                wanted: want,
                available: members.len(),
            });
            sampled.extend(members.iter().map(|&i| pool[i].clone()));
            continue;
        }
        let mut picks: Vec<usize> = index::sample(&mut rng, members.len(), want)
            .into_iter()
            .collect();
        picks.sort_unstable();
        sampled.extend(picks.into_iter().map(|k| pool[members[k]].clone()));
    }
    BalanceOutcome { sampled, warnings }
}
