//! Everything computed from a fitted state: pruning, salience, top words,
//! volume series, rank correlations, cosine grids and the cell regressions.

mod cosine;
mod meta;
mod prune;
mod regression;
mod salience;
mod spearman;
mod volume;
mod words;

use thiserror::Error;

use crate::model::{ModelState, TopicId};
use crate::CorpusSet;

pub use cosine::{
    corpus_topic_vector, corpus_topic_vectors, cosine, cosine_dense, cosine_similarity_grid, OmittedCell,
    SimilarityCell, SimilarityGrid, SparseVector,
};
pub use meta::{load_topic_meta, resolve_topic_meta, seed_topic_meta, TopicMeta, TopicOrigin};
pub use prune::{prune_topics, DroppedTopic, PruneReport};
pub use regression::{
    build_regression_frame, ols, ols_hc_robust, Coefficient, HcFlavor, ModelSpec, Predictor, RegressionFrame,
    RegressionResult,
};
pub use salience::{topic_salience, SalienceTable};
pub use spearman::{rank_correlation_matrix, significance_stars, spearman_rho, CorrelationCell, CorrelationMatrix, Spearman};
pub use volume::{daily_volume, VolumeSeries};
pub use words::{top_words, TopWord};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("vectors have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("rank correlation undefined: input is constant")]
    ConstantInput,
    #[error("design matrix is rank deficient: {predictor} is a linear combination of earlier columns")]
    RankDeficient { predictor: String },
    #[error("corpus {0:?} of the fitted state is not in the corpus set")]
    UnknownCorpus(String),
    #[error("topic {0} is not live in the state")]
    NoSuchTopic(TopicId),
    #[error("no metadata for retained new topics {0:?}")]
    MissingTopicMeta(Vec<TopicId>),
    #[error("topic metadata: {0}")]
    Meta(String),
}

/// Index of each report column (corpus set order) in the state's corpus list.
pub(crate) fn column_map(state: &ModelState, corpora: &CorpusSet) -> Result<Vec<Option<usize>>, AnalyticsError> {
    if let Some(unknown) = state.corpora().iter().find(|c| corpora.get(c).is_none()) {
        return Err(AnalyticsError::UnknownCorpus(unknown.clone()));
    }
    Ok(corpora.tags().map(|t| state.corpus_index(t)).collect())
}
