//! Seeded Dirichlet-process multinomial mixture with collapsed Gibbs inference.
//!
//! Labeled documents are pinned to their seed topic. Each unlabeled document is
//! resampled from
//!
//! ```text
//! p(z_d = k | rest) ∝ n_k^{¬d} · p(w_d | topic k)     for live topics k
//! p(z_d = new | rest) ∝ α · p(w_d | empty topic)
//! ```
//!
//! where `n_k` counts labeled and unlabeled documents alike and the
//! topic-word distributions are integrated out under a symmetric Dirichlet(β).

mod counts;
mod joint;
mod likelihood;
mod persist;
mod sampler;
mod state;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use counts::TopicCounts;
pub use joint::log_joint;
pub use likelihood::{doc_likelihood_new, doc_likelihood_seeded, occurrence_ranks, LnCache};
pub use persist::{StateFile, TopicRecord, STATE_FORMAT};
pub use sampler::{gibbs_sweep, run_inference, run_sweeps, InferenceRun, SweepDiagnostics};
pub use state::{ModelState, Placement, TopicDistribution};

/// Topic identifier. Seed topics are `1..=K̂`; new topics continue upwards and
/// ids are never reused within a run.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TopicId(pub u32);

impl std::fmt::Display for TopicId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LikelihoodMode {
    /// Per-token predictive ratios without within-document count increments.
    #[default]
    PaperApproximate,
    /// Exact Dirichlet-multinomial (Pólya) predictive.
    ExactCollapsed,
}

impl std::str::FromStr for LikelihoodMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper-approximate" | "approximate" => Ok(Self::PaperApproximate),
            "exact-collapsed" | "exact" => Ok(Self::ExactCollapsed),
            other => Err(format!("unknown likelihood mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub sweeps: usize,
    pub likelihood_mode: LikelihoodMode,
    pub rng_seed: u64,
    /// Visit unlabeled documents in a fresh random order each sweep.
    pub shuffle_sweeps: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.5,
            sweeps: 100,
            likelihood_mode: LikelihoodMode::PaperApproximate,
            rng_seed: 0,
            shuffle_sweeps: false,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(ModelError::Params(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(ModelError::Params(format!("beta must be positive, got {}", self.beta)));
        }
        if self.sweeps < 1 {
            return Err(ModelError::Params("sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

/// A broken internal invariant. Each variant names the invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("count-consistency: topic {topic} differs from a recount ({detail})")]
    CountMismatch { topic: TopicId, detail: String },
    #[error("conservation: topics hold {held} documents, {expected} are assigned")]
    DocumentConservation { held: u64, expected: u64 },
    #[error("conservation: topics hold {held} tokens, {expected} are assigned")]
    TokenConservation { held: u64, expected: u64 },
    #[error("seed-immutability: labeled document {doc:?} is assigned to {found}, seed is {seed}")]
    SeedMoved {
        doc: String,
        seed: TopicId,
        found: TopicId,
    },
    #[error("no-empty-new-topic: topic {0} is live with zero documents")]
    EmptyNewTopic(TopicId),
    #[error("vocabulary-range: document {doc:?} has term id {term} >= V = {vocab_size}")]
    TermOutOfRange {
        doc: String,
        term: u32,
        vocab_size: usize,
    },
    #[error("topic-order: topic ids are not strictly increasing at {0}")]
    TopicOrder(TopicId),
    #[error("assignment: document {doc:?} points at missing topic {topic}")]
    DanglingAssignment { doc: String, topic: TopicId },
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    Params(String),
    #[error("document {doc:?}: seed topic {topic} outside 1..={seed_topics}")]
    SeedOutOfRange {
        doc: String,
        topic: TopicId,
        seed_topics: usize,
    },
    #[error("document {0:?} has no tokens")]
    EmptyDocument(String),
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
    #[error("document index {0} out of range")]
    NoSuchDocument(usize),
    #[error("document {0:?} is labeled; its assignment is fixed")]
    LabeledDocument(String),
    #[error("document {0:?} is not currently assigned")]
    Detached(String),
    #[error("document {0:?} is already assigned")]
    Attached(String),
    #[error("topic {0} does not exist")]
    NoSuchTopic(TopicId),
    #[error("state file: {0}")]
    Persist(String),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
}
