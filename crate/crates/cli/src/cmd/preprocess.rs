use seedtopic::io::{write_jsonl, DOCUMENTS_FORMAT, VOCABULARY_FORMAT};
use seedtopic::text::preprocess;

use crate::config::RunConfig;
use crate::error::CmdResult;
use crate::inputs;
use crate::output::{ensure_dir, grouped, header, out_path, write_json, DOCUMENTS_FILE, PREPROCESS_REPORT_FILE, VOCABULARY_FILE};

pub fn run(cfg: &RunConfig) -> CmdResult<()> {
    let records = inputs::records(cfg)?;
    let scheme = inputs::scheme(cfg)?;
    let pc = cfg.effective_preprocess()?;
    log::info!("preprocessing {} records", grouped(records.len()));
    let out = preprocess(&records, &scheme, &cfg.corpora, &cfg.balance, &pc, cfg.model.rng_seed)?;
    ensure_dir(&cfg.paths.out)?;
    write_jsonl(&out_path(cfg, DOCUMENTS_FILE), &header(cfg, DOCUMENTS_FORMAT), &out.documents)?;
    write_jsonl(
        &out_path(cfg, VOCABULARY_FILE),
        &header(cfg, VOCABULARY_FORMAT),
        out.vocabulary.entries(),
    )?;
    write_json(
        &out_path(cfg, PREPROCESS_REPORT_FILE),
        &header(cfg, "seedtopic-preprocess-report"),
        "report",
        &out.report,
    )?;

    let r = &out.report;
    for c in &r.corpora {
        let mut notes = vec![format!("{} raw", grouped(c.raw_records))];
        if c.excluded_seed_code > 0 {
            notes.push(format!("{} without a matching seed code", grouped(c.excluded_seed_code)));
        }
        if c.rejected_empty + c.rejected_too_short > 0 {
            notes.push(format!(
                "{} empty, {} too short",
                grouped(c.rejected_empty),
                grouped(c.rejected_too_short)
            ));
        }
        if c.dropped_by_balance > 0 {
            notes.push(format!("{} removed by balancing", grouped(c.dropped_by_balance)));
        }
        if c.dropped_by_vocabulary > 0 {
            notes.push(format!("{} emptied by vocabulary pruning", grouped(c.dropped_by_vocabulary)));
        }
        say!(
            "{}: {} documents, {} tokens ({})",
            c.corpus,
            grouped(c.documents),
            grouped(c.tokens),
            notes.join("; ")
        );
    }
    for (pair, w) in &r.balance_warnings {
        say!("balance {} <- {}: {w:?}", pair.reference, pair.pool);
    }
    say!("vocabulary: {} terms", grouped(r.vocabulary_size));
    Ok(())
}
