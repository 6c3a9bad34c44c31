use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ModelError, ModelParams, ModelState, TopicCounts, TopicId};
use crate::text::TokenDocument;

pub const STATE_FORMAT: &str = "seedtopic-state";
const STATE_VERSION: u32 = 1;

/// Count tables of one topic with term lists sorted by term id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicRecord {
    pub id: TopicId,
    pub is_seed: bool,
    pub doc_count: u32,
    pub per_corpus: Vec<u32>,
    pub labeled: Vec<(u32, u32)>,
    pub unlabeled: Vec<(u32, u32)>,
}

impl TopicRecord {
    fn capture(t: &TopicCounts) -> Self {
        Self {
            id: t.id(),
            is_seed: t.is_seed(),
            doc_count: t.doc_count(),
            per_corpus: t.per_corpus().to_vec(),
            labeled: t.labeled_terms(),
            unlabeled: t.unlabeled_terms(),
        }
    }

    fn to_counts(&self) -> TopicCounts {
        TopicCounts::from_parts(
            self.id,
            self.is_seed,
            self.doc_count,
            self.per_corpus.clone(),
            &self.labeled,
            &self.unlabeled,
        )
    }
}

/// Everything needed to resume sampling bit-for-bit: assignments, count
/// tables, the next topic id and the RNG stream position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub params: ModelParams,
    pub vocab_size: usize,
    pub vocab_hash: String,
    pub seed_topics: usize,
    pub next_topic_id: u32,
    pub sweeps_completed: usize,
    /// ChaCha word position, as a decimal string (it is a u128).
    pub rng_word_pos: String,
    pub corpora: Vec<String>,
    pub topics: Vec<TopicRecord>,
    pub assignments: Vec<(String, TopicId)>,
}

impl StateFile {
    pub fn capture(
        state: &ModelState,
        rng: &ChaCha8Rng,
        sweeps_completed: usize,
        config_hash: &str,
        vocab_hash: &str,
    ) -> Self {
        let assignments = state
            .docs()
            .iter()
            .zip(state.assignments())
            .filter_map(|(d, a)| a.map(|t| (d.id.clone(), t)))
            .collect();
        Self {
            format: STATE_FORMAT.into(),
            version: STATE_VERSION,
            config_hash: config_hash.into(),
            params: state.params().clone(),
            vocab_size: state.vocab_size(),
            vocab_hash: vocab_hash.into(),
            seed_topics: state.seed_topic_count(),
            next_topic_id: state.next_topic_id(),
            sweeps_completed,
            rng_word_pos: rng.get_word_pos().to_string(),
            corpora: state.corpora().to_vec(),
            topics: state.topics().iter().map(TopicRecord::capture).collect(),
            assignments,
        }
    }

    /// Replays the stored assignments over `docs` and checks the result
    /// against the stored count tables.
    pub fn restore(&self, docs: Vec<TokenDocument>, vocab_hash: &str) -> Result<(ModelState, ChaCha8Rng), ModelError> {
        let fail = |m: String| Err(ModelError::Persist(m));
        if self.format != STATE_FORMAT || self.version != STATE_VERSION {
            return fail(format!("unsupported format {} v{}", self.format, self.version));
        }
        if self.vocab_hash != vocab_hash {
            return fail("vocabulary differs from the one the state was trained on".into());
        }
        let map: HashMap<String, TopicId> = self.assignments.iter().cloned().collect();
        if map.len() != self.assignments.len() {
            return fail("duplicate document in assignments".into());
        }
        let state = ModelState::replay(
            docs,
            self.params.clone(),
            self.vocab_size,
            self.seed_topics,
            &map,
            self.next_topic_id,
        )?;
        if state.corpora() != self.corpora.as_slice() {
            return fail(format!("corpus order {:?} differs from stored {:?}", state.corpora(), self.corpora));
        }
        let attached = state.assignments().iter().filter(|a| a.is_some()).count();
        if attached != self.assignments.len() {
            return fail(format!(
                "{} stored assignments refer to unknown documents",
                self.assignments.len() - attached
            ));
        }
        let stored: Vec<TopicCounts> = self.topics.iter().map(TopicRecord::to_counts).collect();
        if stored.as_slice() != state.topics() {
            return fail("stored count tables disagree with the replayed assignments".into());
        }
        state.verify_counts()?;
        let pos: u128 = self
            .rng_word_pos
            .parse()
            .map_err(|_| ModelError::Persist(format!("bad rng position {:?}", self.rng_word_pos)))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.rng_seed);
        rng.set_word_pos(pos);
        Ok((state, rng))
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let err = |e: std::io::Error| ModelError::Persist(format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(File::create(path).map_err(err)?);
        serde_json::to_writer(&mut w, self).map_err(|e| ModelError::Persist(e.to_string()))?;
        w.write_all(b"\n").map_err(err)?;
        w.flush().map_err(err)
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let f = File::open(path).map_err(|e| ModelError::Persist(format!("{}: {e}", path.display())))?;
        serde_json::from_reader(BufReader::new(f))
            .map_err(|e| ModelError::Persist(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{run_inference, run_sweeps};

    fn docs() -> Vec<TokenDocument> {
        (0..30u32)
            .map(|i| TokenDocument {
                id: format!("d{i}"),
                corpus: if i < 4 { "s".into() } else { format!("m{}", i % 2) },
                tokens: vec![i % 4, (i * 3) % 7, 6],
                seed_topic: (i < 4).then_some(TopicId(1 + i % 2)),
                timestamp: None,
                stratum: None,
            })
            .collect()
    }

    #[test]
    fn round_trip_resumes_identically() {
        let p = ModelParams {
            sweeps: 4,
            rng_seed: 21,
            ..ModelParams::default()
        };
        let whole = run_inference(docs(), p.clone(), 7, 2, false).unwrap();

        let half = run_inference(docs(), ModelParams { sweeps: 2, ..p }, 7, 2, false).unwrap();
        let file = StateFile::capture(&half.state, &half.rng, 2, "cfg", "voc");
        let dir = std::env::temp_dir().join(format!("seedtopic-persist-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.json");
        file.save(&path).unwrap();
        let loaded = StateFile::load(&path).unwrap();
        assert_eq!(loaded, file);
        let (mut state, mut rng) = loaded.restore(docs(), "voc").unwrap();
        run_sweeps(&mut state, &mut rng, 2, 3, true).unwrap();
        assert_eq!(state.assignments(), whole.state.assignments());
        assert_eq!(state.topics(), whole.state.topics());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn tampered_tables_are_rejected() {
        let run = run_inference(docs(), ModelParams { sweeps: 1, ..ModelParams::default() }, 7, 2, false).unwrap();
        let mut file = StateFile::capture(&run.state, &run.rng, 1, "cfg", "voc");
        file.topics[0].doc_count += 1;
        assert!(matches!(file.restore(docs(), "voc"), Err(ModelError::Persist(_))));
        let file = StateFile::capture(&run.state, &run.rng, 1, "cfg", "voc");
        assert!(matches!(file.restore(docs(), "other"), Err(ModelError::Persist(_))));
    }
}
