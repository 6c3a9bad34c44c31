//! Corpus descriptors shared by preprocessing and analytics.

use serde::{Deserialize, Serialize};

/// Channel a corpus was collected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Medium {
    Survey,
    Facebook,
    Twitter,
}

/// Who authored the documents of a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Actor {
    Respondents,
    Politicians,
    Audience,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub tag: String,
    pub medium: Medium,
    pub actor: Actor,
    /// The labeled corpus carries seed codes; exactly one corpus should set this.
    #[serde(default)]
    pub labeled: bool,
}

impl CorpusSpec {
    pub fn new(tag: impl Into<String>, medium: Medium, actor: Actor, labeled: bool) -> Self {
        Self {
            tag: tag.into(),
            medium,
            actor,
            labeled,
        }
    }

    pub fn is_politicians_on(&self, medium: Medium) -> bool {
        self.actor == Actor::Politicians && self.medium == medium
    }

    pub fn is_audience_on(&self, medium: Medium) -> bool {
        self.actor == Actor::Audience && self.medium == medium
    }
}

/// Ordered set of corpora. Order is the column order of every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorpusSet(pub Vec<CorpusSpec>);

impl CorpusSet {
    /// Survey plus politicians and audiences on Facebook and Twitter.
    pub fn five_corpora() -> Self {
        CorpusSet(vec![
            CorpusSpec::new("survey", Medium::Survey, Actor::Respondents, true),
            CorpusSpec::new("fb-politicians", Medium::Facebook, Actor::Politicians, false),
            CorpusSpec::new("tw-politicians", Medium::Twitter, Actor::Politicians, false),
            CorpusSpec::new("fb-audience", Medium::Facebook, Actor::Audience, false),
            CorpusSpec::new("tw-audience", Medium::Twitter, Actor::Audience, false),
        ])
    }

    pub fn specs(&self) -> &[CorpusSpec] {
        &self.0
    }

    pub fn get(&self, tag: &str) -> Option<&CorpusSpec> {
        self.0.iter().find(|c| c.tag == tag)
    }

    pub fn labeled(&self) -> Option<&CorpusSpec> {
        self.0.iter().find(|c| c.labeled)
    }

    pub fn is_labeled(&self, tag: &str) -> bool {
        self.get(tag).is_some_and(|c| c.labeled)
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|c| c.tag.as_str())
    }

    /// All unordered pairs `(i, j)` with `i < j`, in column order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.0.len();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect()
    }
}

impl Default for CorpusSet {
    fn default() -> Self {
        Self::five_corpora()
    }
}
