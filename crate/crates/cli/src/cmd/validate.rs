use std::path::Path;

use seedtopic::validation::{self, fault_injection, CheckOutcome, Profile};

use crate::error::{CmdResult, ExitClass, Failure};

pub struct ValidateOptions {
    pub quick: bool,
    pub inject_fault: bool,
    /// Restrict to these check ids.
    pub only: Vec<u8>,
    /// Also write one JSON line per check here.
    pub json: Option<std::path::PathBuf>,
}

pub fn run(opts: &ValidateOptions) -> CmdResult<()> {
    if opts.inject_fault {
        return match fault_injection() {
            Ok(()) => Err(Failure::data("corrupted count table went undetected")),
            Err(v) => Err(Failure::new(ExitClass::Invariant, anyhow::anyhow!("invariant violated: {v}"))),
        };
    }
    let profile = if opts.quick { Profile::Quick } else { Profile::Full };
    let mut outcomes = Vec::new();
    for (id, check) in validation::CHECKS {
        if !opts.only.is_empty() && !opts.only.contains(&id) {
            continue;
        }
        let outcome = check(profile);
        say!("{outcome}");
        outcomes.push(outcome);
    }
    if let Some(path) = &opts.json {
        write_outcomes(path, &outcomes)?;
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    say!("{} of {} checks passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(ExitClass::CheckFailed, anyhow::anyhow!("failed checks: {}", failed.join(", "))))
    }
}

fn write_outcomes(path: &Path, outcomes: &[CheckOutcome]) -> CmdResult<()> {
    let mut text = String::new();
    for o in outcomes {
        text.push_str(&serde_json::to_string(o).expect("serializable outcome"));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Failure::new(ExitClass::Other, anyhow::anyhow!("{}: {e}", path.display())))
}
