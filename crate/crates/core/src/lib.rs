//! Seeded Dirichlet-process multinomial mixture for short texts.
//!
//! The crate is organised along the pipeline:
//!
//! - [`text`] turns raw records into token documents over one shared vocabulary;
//! - [`model`] holds the collapsed Gibbs sampler that places unlabeled documents
//!   into seed topics or freshly created topics;
//! - [`analytics`] computes everything downstream of a fitted state (pruning,
//!   salience, rank correlations, cosine grids, robust OLS);
//! - [`oracle`] contains the independent verification machinery (exact
//!   enumeration, synthetic corpora, adjusted Rand index, naive OLS);
//! - [`validation`] wires the oracles into pass/fail checks.

pub mod analytics;
pub mod corpus;
pub mod io;
pub mod model;
pub mod oracle;
pub mod text;
pub mod validation;

pub use corpus::{Actor, CorpusSet, CorpusSpec, Medium};
pub use model::{LikelihoodMode, ModelParams, ModelState, TopicId};
