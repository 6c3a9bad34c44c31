use seedtopic::analytics::{prune_topics, topic_salience};
use seedtopic::model::{run_inference, run_sweeps, StateFile};
use seedtopic::oracle::{generate_synthetic, recovery_score, synthetic_records, SyntheticCorpusSpec, SyntheticSpec};
use seedtopic::text::{preprocess, BalancePair, PreprocessConfig, SeedScheme};
use seedtopic::{CorpusSet, ModelParams, TopicId};

fn five_corpus_spec() -> SyntheticSpec {
    let scheme = SeedScheme::gles_2013();
    SyntheticSpec {
        seed_topics: scheme.topic_count(),
        extra_topics: 2,
        vocab_size: 400,
        corpora: CorpusSet::five_corpora()
            .specs()
            .iter()
            .map(|c| SyntheticCorpusSpec {
                tag: c.tag.clone(),
                docs: if c.labeled { 270 } else { 300 },
                labeled: c.labeled,
            })
            .collect(),
        mean_length: 10.0,
        min_length: 3,
        alpha: 5.0,
        beta: 0.1,
        disjoint_topics: false,
        labeled_from_theta: true,
        rng_seed: 5,
    }
}

#[test]
fn records_to_salience() {
    let scheme = SeedScheme::gles_2013();
    let corpora = CorpusSet::five_corpora();
    let synthetic = generate_synthetic(&five_corpus_spec()).unwrap();
    let records = synthetic_records(&synthetic, &scheme).unwrap();
    let out = preprocess(&records, &scheme, &corpora, &BalancePair::five_corpora_defaults(), &PreprocessConfig::default(), 1).unwrap();
    assert!(!out.documents.is_empty());
    assert_eq!(out.report.vocabulary_size, out.vocabulary.len());

    let params = ModelParams { sweeps: 15, beta: 0.1, ..ModelParams::default() };
    let run = run_inference(out.documents, params, out.vocabulary.len(), scheme.topic_count(), true).unwrap();
    run.state.verify_counts().unwrap();
    assert_eq!(run.diagnostics.len(), 16);

    let prune = prune_topics(&run.state, &corpora).unwrap();
    for k in 1..=scheme.topic_count() as u32 {
        assert!(prune.retained.contains(&TopicId(k)), "seed topic {k} pruned");
    }
    let table = topic_salience(&run.state, &corpora, &prune.retained).unwrap();
    for c in 0..table.corpora.len() {
        if let Some(sum) = table.column_sum(c) {
            assert!((sum - 100.0).abs() < 1e-9, "{}: {sum}", table.corpora[c]);
        }
    }
}

#[test]
fn saved_state_continues_identically() {
    let mut spec = SyntheticSpec::two_corpora(4, 1, 120, 80, 200, 6.0, 9);
    spec.beta = 0.2;
    let corpus = generate_synthetic(&spec).unwrap();
    let params = ModelParams { sweeps: 5, ..ModelParams::default() };
    let run = run_inference(corpus.docs.clone(), params, 120, 4, true).unwrap();

    let path = std::env::temp_dir().join(format!("seedtopic-state-{}.json", std::process::id()));
    StateFile::capture(&run.state, &run.rng, 5, "cfg", "vocab").save(&path).unwrap();
    let loaded = StateFile::load(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(loaded.restore(corpus.docs.clone(), "other").is_err());
    let (mut restored, mut rng) = loaded.restore(corpus.docs.clone(), "vocab").unwrap();
    assert_eq!(restored.assignments(), run.state.assignments());

    let (mut original, mut original_rng) = (run.state, run.rng);
    run_sweeps(&mut original, &mut original_rng, 5, 5, true).unwrap();
    run_sweeps(&mut restored, &mut rng, 5, 5, true).unwrap();
    assert_eq!(restored.assignments(), original.assignments());
    assert_eq!(seedtopic::model::log_joint(&restored).to_bits(), seedtopic::model::log_joint(&original).to_bits());
}

#[test]
fn disjoint_topics_are_recovered_exactly() {
    // With heavy smoothing a small extra topic is cheaper to absorb into a
    // seed than to open; sharp topics keep it apart.
    let mut spec = SyntheticSpec::two_corpora(5, 1, 300, 100, 300, 8.0, 21);
    spec.disjoint_topics = true;
    spec.beta = 0.1;
    let corpus = generate_synthetic(&spec).unwrap();
    let truth = corpus.unlabeled_truth();
    let params = ModelParams { sweeps: 30, beta: 0.1, ..ModelParams::default() };
    let run = run_inference(corpus.docs.clone(), params, 300, 5, false).unwrap();
    let inferred: Vec<TopicId> = corpus
        .docs
        .iter()
        .zip(run.state.assignments())
        .filter(|(d, _)| d.seed_topic.is_none())
        .map(|(_, a)| a.unwrap())
        .collect();
    assert_eq!(recovery_score(&truth, &inferred), 1.0);
}
