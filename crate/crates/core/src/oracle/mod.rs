//! Independent checks for the sampler and the analytics: brute-force
//! posterior enumeration, a synthetic corpus generator, the adjusted Rand
//! index and a plain normal-equations OLS.

mod ari;
mod enumerate;
mod ols;
mod synthetic;

pub use ari::recovery_score;
pub use enumerate::{canonicalize, enumerate_exact_posterior, CanonicalLabel, EnumeratedPosterior, EnumerationError, MAX_ASSIGNMENTS};
pub use ols::{naive_ols, NaiveOls};
pub use synthetic::{generate_synthetic, synthetic_records, synthetic_word, write_truth, SyntheticCorpus, SyntheticCorpusSpec, SyntheticSpec, TruthRecord, TRUTH_FORMAT};
