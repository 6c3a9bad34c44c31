/// `println!` that keeps going when stdout is closed (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

mod cmd;
mod config;
mod error;
mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seedtopic::analytics::HcFlavor;
use seedtopic::LikelihoodMode;

use crate::cmd::train::TrainOptions;
use crate::cmd::validate::ValidateOptions;
use crate::config::{Overrides, RunConfig, CONFIG_ENV};
use crate::error::{CmdResult, Failure};

#[derive(Parser)]
#[command(name = "seedtopic", version, about = "Seeded topic model for short texts and cross-corpus agenda analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// paper-approximate or exact-collapsed.
    #[arg(long)]
    likelihood_mode: Option<LikelihoodMode>,
    /// Robust standard errors: HC0, HC1, HC2 or HC3.
    #[arg(long)]
    hc: Option<HcFlavor>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize, filter and index the records; write documents and vocabulary.
    Preprocess(Common),
    /// Run the Gibbs sampler and write the state and per-sweep diagnostics.
    Train {
        #[command(flatten)]
        common: Common,
        /// Continue from the saved state.
        #[arg(long)]
        resume: bool,
        /// Stop after this many sweeps in this invocation.
        #[arg(long)]
        stop_after: Option<usize>,
        /// Recount every table after every sweep.
        #[arg(long)]
        verify_counts: bool,
    },
    /// Prune, then write salience, top words, correlations, similarity grid and regressions.
    Analyze(Common),
    /// Print the topic table and write the labeling sheet for new topics.
    Report(Common),
    /// Run the built-in correctness and performance checks.
    Validate {
        /// Smaller workloads, same tolerances.
        #[arg(long)]
        quick: bool,
        /// Corrupt a count table and report the violated invariant.
        #[arg(long)]
        inject_fault: bool,
        /// Run only these checks (comma-separated ids).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Write the outcomes as JSON lines.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn load(common: &Common) -> CmdResult<RunConfig> {
    let overrides = Overrides {
        seed: common.seed,
        sweeps: common.sweeps,
        alpha: common.alpha,
        beta: common.beta,
        likelihood_mode: common.likelihood_mode,
        hc: common.hc,
        out: common.out.clone(),
    };
    let cfg = match &common.config {
        Some(path) => RunConfig::load(path, &overrides)?,
        None => {
            return Err(Failure::config(format!(
                "no configuration: pass --config or set {CONFIG_ENV}"
            )))
        }
    };
    cfg.validate()?;
    log::info!("config hash {}, seed {}, run id {}", cfg.hash(), cfg.model.rng_seed, cfg.run_id());
    Ok(cfg)
}

fn dispatch(cli: Cli) -> CmdResult<()> {
    match cli.command {
        Command::Preprocess(c) => cmd::preprocess::run(&load(&c)?),
        Command::Train {
            common,
            resume,
            stop_after,
            verify_counts,
        } => cmd::train::run(
            &load(&common)?,
            &TrainOptions {
                resume,
                stop_after,
                verify_every_sweep: verify_counts,
            },
        ),
        Command::Analyze(c) => cmd::analyze::run(&load(&c)?),
        Command::Report(c) => cmd::report::run(&load(&c)?),
        Command::Validate {
            quick,
            inject_fault,
            only,
            json,
        } => cmd::validate::run(&ValidateOptions {
            quick,
            inject_fault,
            only,
            json,
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.class as u8)
        }
    }
}
