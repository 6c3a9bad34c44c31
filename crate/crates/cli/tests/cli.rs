mod common;

use common::{bundle, fixture, full_pipeline, run, run_ok};

#[test]
fn pipeline_writes_headed_outputs() {
    let dir = fixture(3, "topic_meta = \"topic_meta.tsv\"");
    full_pipeline(dir.path(), &[]);
    let out = dir.path().join("out");
    let files = bundle(&out);
    for name in [
        "documents.jsonl",
        "vocabulary.jsonl",
        "state.json",
        "diagnostics.jsonl",
        "analysis/salience.tsv",
        "analysis/correlations.tsv",
        "analysis/similarity.tsv",
        "analysis/regression_model1.tsv",
        "analysis/regression_model5.tsv",
        "analysis/top_words.txt",
        "analysis/volume.tsv",
    ] {
        assert!(files.contains_key(name), "{name} missing");
    }
    let hash = {
        let diag = String::from_utf8(files["diagnostics.jsonl"].clone()).unwrap();
        let head: serde_json::Value = serde_json::from_str(diag.lines().next().unwrap()).unwrap();
        assert_eq!(head["params"]["alpha"], 1.0);
        assert_eq!(head["params"]["sweeps"], 20);
        head["header"]["config_hash"].as_str().unwrap().to_string()
    };
    for (name, bytes) in &files {
        if name.ends_with(".tsv") || name.ends_with(".txt") {
            let text = String::from_utf8_lossy(bytes);
            assert!(text.starts_with("# format="), "{name} has no header line");
        }
        if name == "state.json" || name.starts_with("analysis/") || name.ends_with(".jsonl") {
            continue;
        }
        assert!(String::from_utf8_lossy(bytes).contains("config_hash"), "{name} lacks the config hash");
    }
    // analysis ran under a config that adds topic_meta, so its hash differs
    // from training's; every analysis file carries the same one
    let salience = String::from_utf8_lossy(&files["analysis/salience.tsv"]).to_string();
    let analysis_hash = salience.split("config_hash=").nth(1).unwrap().split(' ').next().unwrap().to_string();
    assert_eq!(analysis_hash, hash);
}

#[test]
fn resume_matches_uninterrupted_run() {
    let dir = fixture(2, "");
    let d = dir.path();
    run_ok(d, &["preprocess", "--config", "seedtopic.toml"]);
    for sub in ["split", "whole"] {
        std::fs::create_dir_all(d.join(sub)).unwrap();
        for f in ["documents.jsonl", "vocabulary.jsonl"] {
            std::fs::copy(d.join("out").join(f), d.join(sub).join(f)).unwrap();
        }
    }
    run_ok(d, &["train", "--config", "seedtopic.toml", "--out", "whole"]);
    run_ok(d, &["train", "--config", "seedtopic.toml", "--out", "split", "--stop-after", "7"]);
    let partial = std::fs::read(d.join("split/state.json")).unwrap();
    run_ok(d, &["train", "--config", "seedtopic.toml", "--out", "split", "--resume"]);
    assert_ne!(partial, std::fs::read(d.join("split/state.json")).unwrap());
    for f in ["state.json", "diagnostics.jsonl"] {
        assert_eq!(
            std::fs::read(d.join("whole").join(f)).unwrap(),
            std::fs::read(d.join("split").join(f)).unwrap(),
            "{f} differs after resume"
        );
    }
}

#[test]
fn resume_under_another_seed_is_refused() {
    let dir = fixture(1, "");
    let d = dir.path();
    run_ok(d, &["preprocess", "--config", "seedtopic.toml"]);
    run_ok(d, &["train", "--config", "seedtopic.toml", "--stop-after", "2"]);
    let out = run(d, &["train", "--config", "seedtopic.toml", "--resume", "--seed", "99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_changes_assignments_not_config_hash() {
    let dir = fixture(2, "");
    let d = dir.path();
    run_ok(d, &["preprocess", "--config", "seedtopic.toml"]);
    std::fs::create_dir_all(d.join("other")).unwrap();
    for f in ["documents.jsonl", "vocabulary.jsonl"] {
        std::fs::copy(d.join("out").join(f), d.join("other").join(f)).unwrap();
    }
    run_ok(d, &["train", "--config", "seedtopic.toml"]);
    run_ok(d, &["train", "--config", "seedtopic.toml", "--seed", "4", "--out", "other"]);
    let load = |p: &str| -> serde_json::Value {
        serde_json::from_slice(&std::fs::read(d.join(p).join("state.json")).unwrap()).unwrap()
    };
    let (a, b) = (load("out"), load("other"));
    assert_eq!(a["config_hash"], b["config_hash"]);
    assert_ne!(a["assignments"], b["assignments"]);
}

#[test]
fn rerunning_preprocess_is_byte_identical() {
    let dir = fixture(1, "");
    let d = dir.path();
    run_ok(d, &["preprocess", "--config", "seedtopic.toml"]);
    let first = bundle(&d.join("out"));
    run_ok(d, &["preprocess", "--config", "seedtopic.toml"]);
    assert_eq!(first, bundle(&d.join("out")));
}

#[test]
fn preprocess_prints_corpus_sizes() {
    let dir = fixture(1, "");
    let stdout = run_ok(dir.path(), &["preprocess", "--config", "seedtopic.toml"]);
    for tag in ["survey", "fb-politicians", "tw-politicians", "fb-audience", "tw-audience"] {
        assert!(stdout.lines().any(|l| l.starts_with(&format!("{tag}: ")) && l.contains(" documents, ")), "{stdout}");
    }
    assert!(stdout.contains("vocabulary: "));
}

#[test]
fn empty_input_names_the_file() {
    let dir = fixture(0, "");
    std::fs::write(dir.path().join("records.jsonl"), "").unwrap();
    let out = run(dir.path(), &["preprocess", "--config", "seedtopic.toml"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("records.jsonl"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = fixture(0, "");
    let d = dir.path();
    let no_config = run(d, &["preprocess"]);
    assert_eq!(no_config.status.code(), Some(2));
    let bad_alpha = run(d, &["preprocess", "--config", "seedtopic.toml", "--alpha", "-1"]);
    assert_eq!(bad_alpha.status.code(), Some(2));
    std::fs::write(d.join("bad.toml"), "[model]\ngamma = 1\n").unwrap();
    assert_eq!(run(d, &["preprocess", "--config", "bad.toml"]).status.code(), Some(2));
    std::fs::write(d.join("missing.toml"), "[paths]\nrecords = \"nope.jsonl\"\n").unwrap();
    let missing = run(d, &["preprocess", "--config", "missing.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.jsonl"));
}

#[test]
fn config_path_from_environment() {
    let dir = fixture(0, "");
    let out = std::process::Command::new(common::bin())
        .current_dir(dir.path())
        .env("SEEDTOPIC_CONFIG", dir.path().join("seedtopic.toml"))
        .arg("preprocess")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_topic_meta_lists_top_words() {
    let dir = fixture(3, "");
    let d = dir.path();
    run_ok(d, &["preprocess", "--config", "seedtopic.toml"]);
    run_ok(d, &["train", "--config", "seedtopic.toml"]);
    let out = run(d, &["analyze", "--config", "seedtopic.toml"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("topic 19: zq"), "{err}");
}

#[test]
fn zero_new_topics_still_analyzed() {
    let dir = fixture(0, "");
    let d = dir.path();
    run_ok(d, &["preprocess", "--config", "seedtopic.toml"]);
    run_ok(d, &["train", "--config", "seedtopic.toml", "--beta", "1.5"]);
    let state: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("out/state.json")).unwrap()).unwrap();
    let new = state["topics"].as_array().unwrap().iter().filter(|t| t["is_seed"] == false).count();
    assert_eq!(new, 0);
    run_ok(d, &["analyze", "--config", "seedtopic.toml", "--beta", "1.5"]);
    let grid = std::fs::read_to_string(d.join("out/analysis/similarity.tsv")).unwrap();
    assert_eq!(grid.lines().count(), 2 + 180);
    let m1 = std::fs::read_to_string(d.join("out/analysis/regression_model1.tsv")).unwrap();
    assert!(m1.contains("left_out\tnew_topic"), "{m1}");
}

#[test]
fn inject_fault_names_the_invariant() {
    let out = run(std::path::Path::new("."), &["validate", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("count-consistency"));
}

#[test]
fn quick_validate_subset() {
    let out = run(std::path::Path::new("."), &["validate", "--quick", "--only", "2,3,5"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
}

#[test]
fn hc_flag_is_recorded() {
    let dir = fixture(2, "topic_meta = \"topic_meta.tsv\"");
    full_pipeline(dir.path(), &["--hc", "hc3"]);
    let m = std::fs::read_to_string(dir.path().join("out/analysis/regression_model2.tsv")).unwrap();
    assert!(m.contains("se_type\tHC3"));
}
