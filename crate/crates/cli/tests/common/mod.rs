#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use seedtopic::oracle::{generate_synthetic, synthetic_records, SyntheticCorpusSpec, SyntheticSpec};
use seedtopic::text::SeedScheme;
use seedtopic::CorpusSet;

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_seedtopic"))
}

/// Five-corpus synthetic records with `extra` topics beyond the 18 seeds.
pub fn write_records(dir: &Path, extra: usize, per_corpus: usize, seed: u64) {
    let scheme = SeedScheme::gles_2013();
    let spec = SyntheticSpec {
        seed_topics: scheme.topic_count(),
        extra_topics: extra,
        vocab_size: 500,
        corpora: CorpusSet::five_corpora()
            .specs()
            .iter()
            .map(|c| SyntheticCorpusSpec {
                tag: c.tag.clone(),
                docs: if c.labeled { per_corpus * 3 / 5 } else { per_corpus },
                labeled: c.labeled,
            })
            .collect(),
        mean_length: 10.0,
        min_length: 3,
        alpha: 5.0,
        beta: 0.1,
        disjoint_topics: false,
        labeled_from_theta: true,
        rng_seed: seed,
    };
    let corpus = generate_synthetic(&spec).unwrap();
    let records = synthetic_records(&corpus, &scheme).unwrap();
    let mut f = std::fs::File::create(dir.join("records.jsonl")).unwrap();
    for r in &records {
        writeln!(f, "{}", serde_json::to_string(r).unwrap()).unwrap();
    }
}

pub fn write_config(dir: &Path, extra: &str) {
    let text = format!(
        "[paths]\nrecords = \"records.jsonl\"\nout = \"out\"\n{extra}\n[model]\nsweeps = 20\nbeta = 0.1\nrng_seed = 3\n"
    );
    std::fs::write(dir.join("seedtopic.toml"), text).unwrap();
}

/// A directory with records and a config; `extra` lands in `[paths]`.
pub fn fixture(extra_topics: usize, paths_extra: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_records(dir.path(), extra_topics, 500, 11);
    write_config(dir.path(), paths_extra);
    dir
}

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .env_remove("SEEDTOPIC_CONFIG")
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .unwrap()
}

pub fn run_ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "seedtopic {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Preprocess, train, write the labeling template, adopt it as topic
/// metadata, analyze.
pub fn full_pipeline(dir: &Path, flags: &[&str]) {
    let with = |cmd: &'static str| {
        let mut v: Vec<&str> = vec![cmd, "--config", "seedtopic.toml"];
        v.extend_from_slice(flags);
        v
    };
    run_ok(dir, &with("preprocess"));
    run_ok(dir, &with("train"));
    run_ok(dir, &with("report"));
    let out = flags
        .iter()
        .position(|f| *f == "--out")
        .map(|i| dir.join(flags[i + 1]))
        .unwrap_or_else(|| dir.join("out"));
    std::fs::copy(out.join("labeling/topic_meta_template.tsv"), dir.join("topic_meta.tsv")).unwrap();
    run_ok(dir, &with("analyze"));
}

/// Every file under `root` except the timings, by relative path.
pub fn bundle(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().is_some_and(|n| n != "timings.json") {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

pub fn bundle_digest(root: &Path) -> String {
    let mut h = Sha256::new();
    for (name, bytes) in bundle(root) {
        h.update(name.as_bytes());
        h.update([0]);
        h.update(Sha256::digest(&bytes));
    }
    hex::encode(h.finalize())
}
