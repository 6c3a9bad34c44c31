use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::path::Path;

use serde::Serialize;
use seedtopic::analytics::{
    build_regression_frame, cosine_similarity_grid, daily_volume, load_topic_meta, ols_hc_robust, prune_topics,
    rank_correlation_matrix, resolve_topic_meta, seed_topic_meta, top_words, topic_salience, AnalyticsError,
    ModelSpec, Predictor, PruneReport, RegressionResult, TopWord, TopicMeta, TopicOrigin,
};
use seedtopic::io::FileHeader;
use seedtopic::text::{TopicKind, VocabularyIndex};
use seedtopic::{ModelState, TopicId};

use crate::config::RunConfig;
use crate::error::{CmdResult, Failure};
use crate::inputs;
use crate::output::{ensure_dir, header, num, opt_num, write_json, write_text, write_tsv, ANALYSIS_DIR};

fn kind_name(k: TopicKind) -> &'static str {
    match k {
        TopicKind::Policy => "policy",
        TopicKind::Politics => "politics",
        TopicKind::Polity => "polity",
    }
}

fn origin_name(o: TopicOrigin) -> &'static str {
    match o {
        TopicOrigin::Seed => "seed",
        TopicOrigin::New => "new",
    }
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// Retained topics, or every live topic when pruning is off.
pub fn retained_topics(cfg: &RunConfig, state: &ModelState) -> CmdResult<PruneReport> {
    if cfg.analytics.prune {
        return Ok(prune_topics(state, &cfg.corpora)?);
    }
    let labeled: BTreeSet<&str> = cfg.corpora.specs().iter().filter(|c| c.labeled).map(|c| c.tag.as_str()).collect();
    Ok(PruneReport {
        threshold: 0,
        retained: state.topics().iter().map(|t| t.id()).collect(),
        dropped: Vec::new(),
        residual_documents: 0,
        unlabeled_documents: state.docs().iter().filter(|d| !labeled.contains(d.corpus.as_str())).count() as u64,
    })
}

pub fn user_meta(cfg: &RunConfig) -> CmdResult<Vec<TopicMeta>> {
    match &cfg.paths.topic_meta {
        None => Ok(Vec::new()),
        Some(path) => {
            let f = File::open(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            load_topic_meta(f).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
        }
    }
}

/// Like `user_meta`, but a configured file that does not exist yet counts
/// as empty; `report` is what produces the template for it.
pub fn user_meta_if_present(cfg: &RunConfig) -> CmdResult<Vec<TopicMeta>> {
    match &cfg.paths.topic_meta {
        Some(path) if !path.exists() => Ok(Vec::new()),
        _ => user_meta(cfg),
    }
}

fn words_line(words: &[TopWord]) -> String {
    words.iter().map(|w| w.term.as_str()).collect::<Vec<_>>().join(", ")
}

#[derive(Serialize)]
struct TopicWords<'a> {
    topic: TopicId,
    label: &'a str,
    words: Vec<TopWord>,
}

#[derive(Serialize)]
struct ModelOutcome {
    model: String,
    dropped_constant: Vec<&'static str>,
    result: Option<RegressionResult>,
    error: Option<String>,
}

pub fn run(cfg: &RunConfig) -> CmdResult<()> {
    let corpus = inputs::corpus(cfg)?;
    let scheme = inputs::scheme(cfg)?;
    let fitted = inputs::fitted(cfg, &corpus)?;
    let state = &fitted.state;
    let vocab = &corpus.vocab;
    let seeds = state.seed_topic_count();
    let top_n = cfg.analytics.top_n;

    let prune = retained_topics(cfg, state)?;
    let meta = match resolve_topic_meta(&prune.retained, seeds, &seed_topic_meta(&scheme), &user_meta(cfg)?) {
        Err(AnalyticsError::MissingTopicMeta(missing)) => return Err(missing_meta(state, vocab, &missing, top_n)),
        other => other?,
    };
    let labels: HashMap<TopicId, &TopicMeta> = meta.iter().map(|m| (m.topic, m)).collect();
    let dir = cfg.paths.out.join(ANALYSIS_DIR);
    ensure_dir(&dir)?;
    let h = |format: &str| header(cfg, format);

    write_json(&dir.join("prune.json"), &h("seedtopic-prune"), "prune", &prune)?;

    // topic salience
    let table = topic_salience(state, &cfg.corpora, &prune.retained)?;
    let mut columns = vec!["topic", "label", "origin", "type"];
    columns.extend(table.corpora.iter().map(String::as_str));
    let mut rows: Vec<Vec<String>> = table
        .topics
        .iter()
        .zip(&table.percent)
        .map(|(t, pct)| {
            let m = labels[t];
            let mut row = vec![t.to_string(), m.label.clone(), origin_name(m.origin).into(), kind_name(m.kind).into()];
            row.extend(pct.iter().map(|p| opt_num(*p)));
            row
        })
        .collect();
    let mut n_row = vec!["N".to_string(), String::new(), String::new(), String::new()];
    n_row.extend(table.column_totals.iter().map(|n| n.to_string()));
    rows.push(n_row);
    write_tsv(&dir.join("salience.tsv"), &h("seedtopic-salience"), &columns, &rows)?;
    write_json(&dir.join("salience.json"), &h("seedtopic-salience"), "salience", &table)?;

    // top words
    let mut text = String::new();
    let mut all_words = Vec::new();
    for m in &meta {
        let words = top_words(state, vocab, m.topic, top_n)?;
        text.push_str(&format!("{}\t{}\n", m.label, words_line(&words)));
        all_words.push(TopicWords {
            topic: m.topic,
            label: &m.label,
            words,
        });
    }
    write_text(&dir.join("top_words.txt"), &h("seedtopic-top-words"), &text)?;
    write_json(&dir.join("top_words.json"), &h("seedtopic-top-words"), "topics", &all_words)?;

    // rank correlations
    let matrix = rank_correlation_matrix(&table);
    let c = matrix.corpora.len();
    let mut columns = vec![""];
    columns.extend(matrix.corpora.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = (0..c)
        .map(|a| {
            let mut row = vec![matrix.corpora[a].clone()];
            row.extend((0..c).map(|b| {
                let cell = matrix.get(a, b);
                cell.rho.map(|r| format!("{:.2}{}", r, cell.stars)).unwrap_or_default()
            }));
            row
        })
        .collect();
    write_tsv(&dir.join("correlations.tsv"), &h("seedtopic-correlations"), &columns, &rows)?;
    write_json(&dir.join("correlations.json"), &h("seedtopic-correlations"), "matrix", &matrix)?;

    // similarity grid
    let grid = cosine_similarity_grid(state, &cfg.corpora, &meta)?;
    let columns = [
        "topic", "label", "corpus_a", "corpus_b", "cosine", "token_total", "survey", "fbpol", "twpol", "twaud",
        "same_medium", "same_actor", "politics", "new_topic",
    ];
    let rows: Vec<Vec<String>> = grid
        .cells
        .iter()
        .map(|s| {
            vec![
                s.topic.to_string(),
                labels[&s.topic].label.clone(),
                s.corpus_a.clone(),
                s.corpus_b.clone(),
                num(s.cosine),
                s.token_total.to_string(),
                flag(s.survey_in_pair),
                flag(s.fbpol_in_pair),
                flag(s.twpol_in_pair),
                flag(s.twaud_in_pair),
                flag(s.same_medium),
                flag(s.same_actor),
                flag(s.topic_is_politics),
                flag(s.topic_is_new),
            ]
        })
        .collect();
    write_tsv(&dir.join("similarity.tsv"), &h("seedtopic-similarity"), &columns, &rows)?;
    write_similarity_wide(&dir.join("similarity_grid.tsv"), &h("seedtopic-similarity-grid"), cfg, &grid, &labels)?;
    let rows: Vec<Vec<String>> = grid
        .omitted
        .iter()
        .map(|o| vec![o.topic.to_string(), o.corpus_a.clone(), o.corpus_b.clone(), o.reason.clone()])
        .collect();
    write_tsv(
        &dir.join("similarity_omitted.tsv"),
        &h("seedtopic-similarity-omitted"),
        &["topic", "corpus_a", "corpus_b", "reason"],
        &rows,
    )?;

    // regressions
    let frame = build_regression_frame(&grid.cells);
    let mut outcomes = Vec::new();
    for spec in ModelSpec::standard() {
        let constant = frame.constant_predictors(&spec);
        let used = ModelSpec {
            name: spec.name.clone(),
            predictors: spec.predictors.iter().copied().filter(|p| !constant.contains(p)).collect(),
        };
        let dropped: Vec<&'static str> = constant.iter().map(|p| Predictor::name(*p)).collect();
        if !dropped.is_empty() {
            log::warn!("{}: {} constant over the frame, left out", spec.name, dropped.join(", "));
        }
        match ols_hc_robust(&frame, &used, cfg.analytics.hc) {
            Ok(r) => {
                write_regression(&dir.join(format!("regression_{}.tsv", spec.name)), &h("seedtopic-regression"), &r, &dropped)?;
                outcomes.push(ModelOutcome {
                    model: spec.name,
                    dropped_constant: dropped,
                    result: Some(r),
                    error: None,
                });
            }
            Err(e) => {
                log::warn!("{}: {e}", spec.name);
                outcomes.push(ModelOutcome {
                    model: spec.name,
                    dropped_constant: dropped,
                    result: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    #[derive(Serialize)]
    struct Regressions<'a> {
        hc: String,
        excluded_cells: &'a [seedtopic::analytics::OmittedCell],
        models: &'a [ModelOutcome],
    }
    write_json(
        &dir.join("regressions.json"),
        &h("seedtopic-regressions"),
        "regressions",
        &Regressions {
            hc: cfg.analytics.hc.to_string(),
            excluded_cells: &frame.excluded,
            models: &outcomes,
        },
    )?;

    // daily volume, when the raw records are at hand
    if cfg.paths.records.is_some() {
        let records = inputs::records(cfg)?;
        let series: Vec<_> = cfg.corpora.tags().map(|t| daily_volume(&records, t)).collect();
        let days: BTreeSet<_> = series.iter().flat_map(|s| s.days.keys().copied()).collect();
        let mut columns = vec!["date"];
        columns.extend(series.iter().map(|s| s.corpus.as_str()));
        let rows: Vec<Vec<String>> = days
            .iter()
            .map(|d| {
                let mut row = vec![d.to_string()];
                row.extend(series.iter().map(|s| s.days.get(d).copied().unwrap_or(0).to_string()));
                row
            })
            .collect();
        write_tsv(&dir.join("volume.tsv"), &h("seedtopic-volume"), &columns, &rows)?;
    }

    let new = meta.iter().filter(|m| m.is_new()).count();
    say!(
        "{} topics retained ({} seed, {new} new), {} dropped; {} similarity cells",
        meta.len(),
        meta.len() - new,
        prune.dropped.len(),
        grid.cells.len()
    );
    for o in &outcomes {
        match &o.result {
            Some(r) => say!("{}: N = {}, R² = {:.3} ({})", o.model, r.n, r.r_squared, r.hc),
            None => say!("{}: not fitted ({})", o.model, o.error.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}

fn write_similarity_wide(
    path: &Path,
    header: &FileHeader,
    cfg: &RunConfig,
    grid: &seedtopic::analytics::SimilarityGrid,
    labels: &HashMap<TopicId, &TopicMeta>,
) -> CmdResult<()> {
    let pairs: Vec<String> = cfg
        .corpora
        .pairs()
        .iter()
        .map(|&(i, j)| format!("{}~{}", cfg.corpora.specs()[i].tag, cfg.corpora.specs()[j].tag))
        .collect();
    let mut by_topic: BTreeMap<TopicId, HashMap<String, f64>> = BTreeMap::new();
    for c in &grid.cells {
        by_topic
            .entry(c.topic)
            .or_default()
            .insert(format!("{}~{}", c.corpus_a, c.corpus_b), c.cosine);
    }
    let mut columns = vec!["topic", "label", "mean"];
    columns.extend(pairs.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = grid
        .topic_order
        .iter()
        .map(|(t, mean)| {
            let mut row = vec![t.to_string(), labels[t].label.clone(), opt_num(*mean)];
            let cells = by_topic.get(t);
            row.extend(pairs.iter().map(|p| opt_num(cells.and_then(|c| c.get(p)).copied())));
            row
        })
        .collect();
    write_tsv(path, header, &columns, &rows)
}

fn write_regression(path: &Path, header: &FileHeader, r: &RegressionResult, dropped: &[&str]) -> CmdResult<()> {
    let mut rows: Vec<Vec<String>> = r
        .coefficients
        .iter()
        .map(|c| vec![c.name.clone(), num(c.estimate), num(c.std_error), num(c.t_value), num(c.p_value)])
        .collect();
    let blank = || vec![String::new(); 3];
    for (k, v) in [
        ("R2", num(r.r_squared)),
        ("adj_R2", num(r.adj_r_squared)),
        ("N", r.n.to_string()),
        ("df_residual", r.df_residual.to_string()),
        ("se_type", r.hc.to_string()),
        ("left_out", dropped.join(",")),
    ] {
        let mut row = vec![k.to_string(), v];
        row.extend(blank());
        rows.push(row);
    }
    write_tsv(path, header, &["term", "estimate", "std_error", "t_value", "p_value"], &rows)
}

/// Error for retained new topics without metadata, with their top words.
fn missing_meta(state: &ModelState, vocab: &VocabularyIndex, missing: &[TopicId], n: usize) -> Failure {
    let mut msg = format!(
        "paths.topic_meta has no entry for {} retained new topic(s); add `topic<TAB>label<TAB>type` rows \
         (`seedtopic report` writes a template):",
        missing.len()
    );
    for &t in missing {
        let words = top_words(state, vocab, t, n).map(|w| words_line(&w)).unwrap_or_default();
        msg.push_str(&format!("\n  topic {t}: {words}"));
    }
    Failure::data(msg)
}
