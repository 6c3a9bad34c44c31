use std::collections::HashMap;

use seedtopic::analytics::top_words;
use seedtopic::TopicId;

use crate::cmd::analyze::{retained_topics, user_meta_if_present};
use crate::config::RunConfig;
use crate::error::CmdResult;
use crate::inputs;
use crate::output::{ensure_dir, header, write_text, LABELING_DIR};

/// Prints the topic table and writes the labeling sheet for new topics:
/// top words and the most typical documents of each retained new topic,
/// plus a metadata template to fill in.
pub fn run(cfg: &RunConfig) -> CmdResult<()> {
    let corpus = inputs::corpus(cfg)?;
    let scheme = inputs::scheme(cfg)?;
    let fitted = inputs::fitted(cfg, &corpus)?;
    let state = &fitted.state;
    let prune = retained_topics(cfg, state)?;
    let user: HashMap<TopicId, String> = user_meta_if_present(cfg)?.into_iter().map(|m| (m.topic, m.label)).collect();
    let texts: HashMap<String, String> = match cfg.paths.records {
        Some(_) => inputs::records(cfg)?.into_iter().map(|r| (r.id, r.text)).collect(),
        None => HashMap::new(),
    };

    say!("{:>5}  {:<7} {:>8}  {}", "topic", "origin", "docs", state.corpora().join(" / "));
    for t in state.topics() {
        let label = scheme
            .label(t.id())
            .map(|l| l.label.clone())
            .or_else(|| user.get(&t.id()).cloned())
            .unwrap_or_default();
        let status = if prune.retained.contains(&t.id()) { "" } else { "  (pruned)" };
        let per: Vec<String> = t.per_corpus().iter().map(u32::to_string).collect();
        say!(
            "{:>5}  {:<7} {:>8}  {}  {label}{status}",
            t.id().to_string(),
            if t.is_seed() { "seed" } else { "new" },
            t.doc_count(),
            per.join(" / ")
        );
    }

    let new: Vec<TopicId> = prune.retained.iter().copied().filter(|t| t.0 as usize > state.seed_topic_count()).collect();
    let mut sheet = String::new();
    let mut template = String::from("topic\tlabel\ttype\n");
    for &t in &new {
        let words = top_words(state, &corpus.vocab, t, cfg.analytics.top_n)?;
        let terms: Vec<&str> = words.iter().map(|w| w.term.as_str()).collect();
        sheet.push_str(&format!("== topic {t} ==\ntop words: {}\n", terms.join(", ")));
        let mut members: Vec<(f64, usize)> = (0..state.docs().len())
            .filter(|&i| state.assignment(i) == Some(t))
            .map(|i| {
                let len = state.docs()[i].tokens.len() as f64;
                let ll = state.doc_likelihood(i, t, true).unwrap_or(f64::NEG_INFINITY);
                (ll / len, i)
            })
            .collect();
        members.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, i) in members.iter().take(cfg.analytics.sample_docs) {
            let d = &state.docs()[i];
            let text = texts.get(&d.id).cloned().unwrap_or_else(|| {
                d.tokens
                    .iter()
                    .map(|&w| corpus.vocab.term(w).unwrap_or("?"))
                    .collect::<Vec<_>>()
                    .join(" ")
            });
            sheet.push_str(&format!("  [{}] {}: {}\n", d.corpus, d.id, text.replace('\n', " ")));
        }
        sheet.push('\n');
        template.push_str(&format!(
            "{}\t{}\tpolicy\n",
            t.0,
            user.get(&t).cloned().unwrap_or_else(|| format!("New topic {}", t.0))
        ));
    }
    let dir = cfg.paths.out.join(LABELING_DIR);
    ensure_dir(&dir)?;
    write_text(&dir.join("new_topics.txt"), &header(cfg, "seedtopic-labeling-sheet"), &sheet)?;
    write_text(&dir.join("topic_meta_template.tsv"), &header(cfg, "seedtopic-topic-meta"), &template)?;
    say!(
        "{} retained new topic(s); labeling sheet in {}",
        new.len(),
        dir.display()
    );
    Ok(())
}
