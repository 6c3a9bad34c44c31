//! Writes a synthetic five-corpus record file and a matching run config.
//!
//! cargo run --example demo_corpus -- demo/

use std::io::Write;
use std::path::PathBuf;

use seedtopic::oracle::{generate_synthetic, synthetic_records, SyntheticCorpusSpec, SyntheticSpec};
use seedtopic::text::SeedScheme;
use seedtopic::CorpusSet;

const CONFIG: &str = r#"# Synthetic demo corpus; see README for every key.
[paths]
records = "records.jsonl"
out = "out"

[model]
sweeps = 50
beta = 0.1
rng_seed = 1

[analytics]
hc = "hc1"
top_n = 8
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "demo".into()));
    std::fs::create_dir_all(&dir)?;
    let scheme = SeedScheme::gles_2013();
    let spec = SyntheticSpec {
        seed_topics: scheme.topic_count(),
        extra_topics: 4,
        vocab_size: 800,
        corpora: CorpusSet::five_corpora()
            .specs()
            .iter()
            .map(|c| SyntheticCorpusSpec {
                tag: c.tag.clone(),
                docs: if c.labeled { 540 } else { 900 },
                labeled: c.labeled,
            })
            .collect(),
        mean_length: 12.0,
        min_length: 3,
        alpha: 5.0,
        beta: 0.1,
        disjoint_topics: false,
        labeled_from_theta: true,
        rng_seed: 2013,
    };
    let corpus = generate_synthetic(&spec)?;
    let records = synthetic_records(&corpus, &scheme)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("records.jsonl"))?);
    for r in &records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    std::fs::write(dir.join("seedtopic.toml"), CONFIG)?;
    println!("{} records and seedtopic.toml written to {}", records.len(), dir.display());
    Ok(())
}
