use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use seedtopic::analytics::HcFlavor;
use seedtopic::io::sha256_hex;
use seedtopic::text::{german_stopwords, BalancePair, PreprocessConfig};
use seedtopic::{CorpusSet, ModelParams};

use crate::error::{CmdResult, Failure};

/// Environment variable naming the config file when `--config` is absent.
pub const CONFIG_ENV: &str = "SEEDTOPIC_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// JSON lines, or CSV/TSV with a header row.
    pub records: Option<PathBuf>,
    /// One term per line, added to the preprocessing stopwords.
    pub stopwords: Option<PathBuf>,
    /// One name per line, removed from the token stream.
    pub blocklist: Option<PathBuf>,
    /// Tab-separated seed scheme; the bundled scheme is used when absent.
    pub seed_scheme: Option<PathBuf>,
    /// Tab-separated `topic label type` rows for new topics.
    pub topic_meta: Option<PathBuf>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            records: None,
            stopwords: None,
            blocklist: None,
            seed_scheme: None,
            topic_meta: None,
            out: default_out(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticsOptions {
    pub prune: bool,
    pub hc: HcFlavor,
    pub top_n: usize,
    /// Sample documents per new topic in the labeling sheet.
    pub sample_docs: usize,
}

impl Default for AnalyticsOptions {
    fn default() -> Self {
        Self {
            prune: true,
            hc: HcFlavor::Hc1,
            top_n: 10,
            sample_docs: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub paths: Paths,
    /// Load the bundled German stopword list in addition to `preprocess.stopwords`.
    #[serde(default = "yes")]
    pub german_stopwords: bool,
    #[serde(default)]
    pub corpora: CorpusSet,
    #[serde(default = "BalancePair::five_corpora_defaults")]
    pub balance: Vec<BalancePair>,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub analytics: AnalyticsOptions,
    /// Paths as written in the file, before resolution; these are hashed.
    #[serde(skip)]
    pub written_paths: Option<Paths>,
}

fn yes() -> bool {
    true
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub sweeps: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub likelihood_mode: Option<seedtopic::LikelihoodMode>,
    pub hc: Option<HcFlavor>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> CmdResult<Self> {
        toml::from_str(text).map_err(Failure::config)
    }

    /// Reads the file, resolves relative paths against its directory and
    /// applies the overrides.
    pub fn load(path: &Path, overrides: &Overrides) -> CmdResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|f| Failure::config(format!("{}: {}", path.display(), f)))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.written_paths = Some(cfg.paths.clone());
        cfg.paths.resolve(base);
        cfg.apply(overrides);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.model.rng_seed = v;
        }
        if let Some(v) = o.sweeps {
            self.model.sweeps = v;
        }
        if let Some(v) = o.alpha {
            self.model.alpha = v;
        }
        if let Some(v) = o.beta {
            self.model.beta = v;
        }
        if let Some(v) = o.likelihood_mode {
            self.model.likelihood_mode = v;
        }
        if let Some(v) = o.hc {
            self.analytics.hc = v;
        }
        if let Some(v) = &o.out {
            self.paths.out = v.clone();
        }
    }

    /// Checks parameters and that every configured input exists.
    pub fn validate(&self) -> CmdResult<()> {
        self.model.validate()?;
        self.preprocess.validate()?;
        if self.corpora.specs().iter().filter(|c| c.labeled).count() != 1 {
            return Err(Failure::config("exactly one corpus must be marked labeled"));
        }
        for b in &self.balance {
            for tag in [&b.reference, &b.pool] {
                if self.corpora.get(tag).is_none() {
                    return Err(Failure::config(format!("balance pair names unknown corpus {tag:?}")));
                }
            }
        }
        let p = &self.paths;
        for (name, path) in [
            ("records", &p.records),
            ("stopwords", &p.stopwords),
            ("blocklist", &p.blocklist),
            ("seed_scheme", &p.seed_scheme),
        ] {
            if let Some(path) = path {
                if !path.is_file() {
                    return Err(Failure::config(format!("paths.{name}: {} does not exist", path.display())));
                }
            }
        }
        Ok(())
    }

    /// Hash of the canonical JSON form. The output directory and the RNG
    /// seed are left out; the seed is recorded next to the hash instead.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        if let Some(p) = c.written_paths.take() {
            c.paths = p;
        }
        c.paths.out = PathBuf::new();
        c.model.rng_seed = 0;
        let value = serde_json::to_value(&c).expect("serializable config");
        sha256_hex(value.to_string().as_bytes())[..16].to_string()
    }

    pub fn run_id(&self) -> String {
        sha256_hex(format!("{}:{}", self.hash(), self.model.rng_seed).as_bytes())[..16].to_string()
    }

    /// Preprocessing settings with the stopword and blocklist files merged in.
    pub fn effective_preprocess(&self) -> CmdResult<PreprocessConfig> {
        let mut pc = self.preprocess.clone();
        if self.german_stopwords {
            pc.stopwords.extend(german_stopwords());
        }
        if let Some(path) = &self.paths.stopwords {
            pc.custom_stopwords.extend(seedtopic::io::read_term_list(path)?);
        }
        if let Some(path) = &self.paths.blocklist {
            pc.name_blocklist.extend(seedtopic::io::read_term_list(path)?);
        }
        Ok(pc)
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.records,
            &mut self.stopwords,
            &mut self.blocklist,
            &mut self.seed_scheme,
            &mut self.topic_meta,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.model, ModelParams::default());
        assert_eq!(c.corpora, CorpusSet::five_corpora());
        assert!(c.german_stopwords);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[model]\ngamma = 2.0\n").is_err());
        assert!(RunConfig::parse("colour = 1\n").is_err());
    }

    #[test]
    fn hash_ignores_seed_and_out_only() {
        let a = RunConfig::parse("").unwrap();
        let mut b = a.clone();
        b.apply(&Overrides {
            seed: Some(9),
            out: Some("elsewhere".into()),
            ..Default::default()
        });
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.run_id(), b.run_id());
        b.apply(&Overrides {
            sweeps: Some(7),
            ..Default::default()
        });
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn flags_win() {
        let mut c = RunConfig::parse("[model]\nalpha = 0.5\nsweeps = 20\n").unwrap();
        c.apply(&Overrides {
            alpha: Some(2.0),
            ..Default::default()
        });
        assert_eq!(c.model.alpha, 2.0);
        assert_eq!(c.model.sweeps, 20);
    }
}
