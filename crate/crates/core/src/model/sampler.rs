use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::joint::log_joint;
use super::{ModelError, ModelParams, ModelState};
use crate::text::TokenDocument;

/// Per-sweep trace. Sweep 0 describes the state right after initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDiagnostics {
    pub sweep: usize,
    pub topics: usize,
    pub new_topics: usize,
    pub reassignments: usize,
    pub log_joint: f64,
}

impl SweepDiagnostics {
    pub fn observe(state: &ModelState, sweep: usize, reassignments: usize) -> Self {
        Self {
            sweep,
            topics: state.topic_count(),
            new_topics: state.new_topic_count(),
            reassignments,
            log_joint: log_joint(state),
        }
    }
}

/// One pass over every unlabeled document. Returns how many documents changed
/// topic (a document moved into a freshly opened topic counts as changed).
pub fn gibbs_sweep<R: Rng + ?Sized>(state: &mut ModelState, rng: &mut R) -> Result<usize, ModelError> {
    let mut order: Vec<usize> = (0..state.docs().len())
        .filter(|&i| !state.docs()[i].is_labeled())
        .collect();
    if state.params().shuffle_sweeps {
        order.shuffle(rng);
    }
    let mut moved = 0;
    for i in order {
        let (before, after) = state.resample(i, rng)?;
        if before != Some(after) {
            moved += 1;
        }
    }
    Ok(moved)
}

/// Runs `sweeps` sweeps numbered from `first_sweep`. With `verify`, the count
/// tables are rebuilt and compared after every sweep.
pub fn run_sweeps<R: Rng + ?Sized>(
    state: &mut ModelState,
    rng: &mut R,
    sweeps: usize,
    first_sweep: usize,
    verify: bool,
) -> Result<Vec<SweepDiagnostics>, ModelError> {
    let mut out = Vec::with_capacity(sweeps);
    for s in first_sweep..first_sweep + sweeps {
        let started = Instant::now();
        let moved = gibbs_sweep(state, rng)?;
        if verify {
            state.verify_counts()?;
        }
        let diag = SweepDiagnostics::observe(state, s, moved);
        log::debug!(
            "sweep {s}: {} topics ({} new), {moved} moved, log joint {:.3}, {:.2?}",
            diag.topics,
            diag.new_topics,
            diag.log_joint,
            started.elapsed()
        );
        out.push(diag);
    }
    Ok(out)
}

/// A finished run. `rng` is positioned where the run stopped, so further
/// sweeps continue the same stream.
#[derive(Debug, Clone)]
pub struct InferenceRun {
    pub state: ModelState,
    pub diagnostics: Vec<SweepDiagnostics>,
    pub rng: ChaCha8Rng,
}

/// Initializes from `params.rng_seed` and runs `params.sweeps` sweeps.
pub fn run_inference(
    docs: Vec<TokenDocument>,
    params: ModelParams,
    vocab_size: usize,
    seed_topics: usize,
    verify: bool,
) -> Result<InferenceRun, ModelError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let sweeps = params.sweeps;
    let mut state = ModelState::initialize(docs, params, vocab_size, seed_topics, &mut rng)?;
    if verify {
        state.verify_counts()?;
    }
    let mut diagnostics = vec![SweepDiagnostics::observe(&state, 0, 0)];
    diagnostics.extend(run_sweeps(&mut state, &mut rng, sweeps, 1, verify)?);
    Ok(InferenceRun {
        state,
        diagnostics,
        rng,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TopicId;

    fn corpus() -> Vec<TokenDocument> {
        let mut docs = Vec::new();
        for i in 0..60u32 {
            let seed = (i < 6).then_some(1 + i % 2);
            let base = if i % 2 == 0 { 0 } else { 5 };
            docs.push(TokenDocument {
                id: format!("d{i}"),
                corpus: if seed.is_some() { "s" } else { "m" }.into(),
                tokens: vec![base + i % 3, base + (i / 3) % 5, base + 4],
                seed_topic: seed.map(TopicId),
                timestamp: None,
                stratum: None,
            });
        }
        docs
    }

    #[test]
    fn same_seed_same_run() {
        let p = ModelParams {
            sweeps: 5,
            rng_seed: 9,
            ..ModelParams::default()
        };
        let a = run_inference(corpus(), p.clone(), 10, 2, true).unwrap();
        let b = run_inference(corpus(), p, 10, 2, true).unwrap();
        assert_eq!(a.state.assignments(), b.state.assignments());
        assert_eq!(a.diagnostics, b.diagnostics);
        assert_eq!(a.diagnostics.len(), 6);
    }

    #[test]
    fn split_runs_match_one_run() {
        let p = ModelParams {
            sweeps: 6,
            rng_seed: 4,
            shuffle_sweeps: true,
            ..ModelParams::default()
        };
        let whole = run_inference(corpus(), p.clone(), 10, 2, false).unwrap();
        let mut half = run_inference(corpus(), ModelParams { sweeps: 3, ..p }, 10, 2, false).unwrap();
        let rest = run_sweeps(&mut half.state, &mut half.rng, 3, 4, false).unwrap();
        assert_eq!(whole.state.assignments(), half.state.assignments());
        assert_eq!(&whole.diagnostics[4..], &rest[..]);
    }
}
