use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use seedtopic::io::{read_jsonl, FileHeader};
use seedtopic::model::{run_sweeps, StateFile, SweepDiagnostics};
use seedtopic::{ModelParams, ModelState};

use crate::config::RunConfig;
use crate::error::{CmdResult, ExitClass, Failure};
use crate::inputs;
use crate::output::{ensure_dir, header, out_path, write_json, DIAGNOSTICS_FILE, STATE_FILE, TIMINGS_FILE};

pub const DIAGNOSTICS_FORMAT: &str = "seedtopic-diagnostics";

pub struct TrainOptions {
    pub resume: bool,
    /// Stop after this many sweeps in this invocation; `--resume` continues.
    pub stop_after: Option<usize>,
    pub verify_every_sweep: bool,
}

#[derive(Serialize)]
struct DiagnosticsHeader<'a> {
    header: &'a FileHeader,
    params: &'a ModelParams,
}

#[derive(Serialize)]
struct Timings {
    command: &'static str,
    sweeps_run: usize,
    seconds: f64,
    seconds_per_sweep: Option<f64>,
}

pub fn run(cfg: &RunConfig, opts: &TrainOptions) -> CmdResult<()> {
    let corpus = inputs::corpus(cfg)?;
    let seeds = inputs::scheme(cfg)?.topic_count();
    let diag_path = out_path(cfg, DIAGNOSTICS_FILE);

    let (mut state, mut rng, done, mut diagnostics) = if opts.resume {
        let fitted = inputs::fitted(cfg, &corpus)?;
        if fitted.file.config_hash != cfg.hash() || fitted.file.params.rng_seed != cfg.model.rng_seed {
            return Err(Failure::config(
                "--resume needs the configuration and seed the state was trained with",
            ));
        }
        let done = fitted.file.sweeps_completed;
        let (_, mut diags): (_, Vec<SweepDiagnostics>) = read_jsonl(&diag_path, DIAGNOSTICS_FORMAT)?;
        diags.retain(|d| d.sweep <= done);
        if diags.len() != done + 1 {
            return Err(Failure::data(format!(
                "{} holds {} sweeps, the state has {done}",
                diag_path.display(),
                diags.len().saturating_sub(1)
            )));
        }
        log::info!("resuming after sweep {done}");
        (fitted.state, fitted.rng, done, diags)
    } else {
        cfg.model.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.model.rng_seed);
        let state = ModelState::initialize(corpus.docs, cfg.model.clone(), corpus.vocab.len(), seeds, &mut rng)?;
        let first = SweepDiagnostics::observe(&state, 0, 0);
        (state, rng, 0, vec![first])
    };
    state.verify_counts().map_err(|e| Failure::new(ExitClass::Invariant, e))?;

    let target = cfg.model.sweeps;
    let remaining = target.saturating_sub(done);
    let now = opts.stop_after.map_or(remaining, |n| n.min(remaining));
    log::info!(
        "{} documents, V = {}, {} seed topics, sweeps {}..={} of {target}",
        state.docs().len(),
        state.vocab_size(),
        seeds,
        done + 1,
        done + now
    );
    let started = Instant::now();
    let mut sweep = done + 1;
    while sweep <= done + now {
        let chunk = (done + now + 1 - sweep).min(10);
        let diags = run_sweeps(&mut state, &mut rng, chunk, sweep, opts.verify_every_sweep)?;
        if let Some(last) = diags.last() {
            log::info!(
                "sweep {}: {} topics ({} new), {} moved, log joint {:.2}",
                last.sweep,
                last.topics,
                last.new_topics,
                last.reassignments,
                last.log_joint
            );
        }
        diagnostics.extend(diags);
        sweep += chunk;
    }
    let seconds = started.elapsed().as_secs_f64();
    state.verify_counts().map_err(|e| Failure::new(ExitClass::Invariant, e))?;

    ensure_dir(&cfg.paths.out)?;
    let completed = done + now;
    StateFile::capture(&state, &rng, completed, &cfg.hash(), &corpus.vocab.digest()).save(&out_path(cfg, STATE_FILE))?;
    write_diagnostics(cfg, &diagnostics)?;
    write_json(
        &out_path(cfg, TIMINGS_FILE),
        &header(cfg, "seedtopic-timings"),
        "timings",
        &Timings {
            command: "train",
            sweeps_run: now,
            seconds,
            seconds_per_sweep: (now > 0).then(|| seconds / now as f64),
        },
    )?;

    let last = diagnostics.last().expect("sweep 0 is always present");
    say!(
        "sweeps {completed}/{target}: {} topics ({} new), log joint {:.4}",
        last.topics, last.new_topics, last.log_joint
    );
    Ok(())
}

fn write_diagnostics(cfg: &RunConfig, diagnostics: &[SweepDiagnostics]) -> CmdResult<()> {
    let path = out_path(cfg, DIAGNOSTICS_FILE);
    let io = |e: std::io::Error| Failure::new(ExitClass::Other, anyhow::anyhow!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    let head = DiagnosticsHeader {
        header: &header(cfg, DIAGNOSTICS_FORMAT),
        params: &cfg.model,
    };
    let mut text = serde_json::to_string(&head).expect("serializable header");
    text.push('\n');
    for d in diagnostics {
        text.push_str(&serde_json::to_string(d).expect("serializable diagnostics"));
        text.push('\n');
    }
    w.write_all(text.as_bytes()).map_err(io)?;
    w.flush().map_err(io)
}
