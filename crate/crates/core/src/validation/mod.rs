//! Pass/fail checks wiring the oracles to the sampler and the analytics.
//!
//! Each check has a full profile (the acceptance thresholds) and a quick
//! profile with smaller workloads. Tolerances are the same in both.

mod analytics_checks;
mod sampler_checks;

use std::fmt;
use std::time::Instant;

use serde::Serialize;

pub use analytics_checks::{check_analytics_oracles, check_report_shapes, report_shape_fixture, ReportShapeFixture};
pub use sampler_checks::{
    check_conditional, check_count_fuzzing, check_mode_equivalence, check_performance, check_recovery,
    check_stationarity, fault_injection, peak_rss_bytes,
};

/// Total-variation bound for the stationarity check.
pub const TV_TOLERANCE: f64 = 0.02;
/// Absolute bound on Monte Carlo frequencies of the conditional check.
pub const FREQUENCY_TOLERANCE: f64 = 0.01;
/// Minimum median adjusted Rand index for synthetic recovery.
pub const MIN_RECOVERY_ARI: f64 = 0.8;
/// Relative agreement of OLS and sandwich errors with the naive oracle.
pub const OLS_RELATIVE_TOLERANCE: f64 = 1e-8;
/// Salience columns must sum to 100 within this.
pub const SALIENCE_SUM_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    #[default]
    Full,
    Quick,
}

impl Profile {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Profile::Full => full,
            Profile::Quick => quick,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Times `body`, which returns pass/fail plus a detail line.
pub(crate) fn timed(id: u8, name: &'static str, body: impl FnOnce() -> (bool, String)) -> CheckOutcome {
    let start = Instant::now();
    let (passed, detail) = body();
    CheckOutcome {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub type Check = fn(Profile) -> CheckOutcome;

/// Every check with its id, in run order.
pub const CHECKS: [(u8, Check); 8] = [
    (1, check_stationarity),
    (2, check_conditional),
    (3, check_mode_equivalence),
    (4, check_recovery),
    (5, check_count_fuzzing),
    (6, check_analytics_oracles),
    (7, check_report_shapes),
    (8, check_performance),
];

/// Runs checks 1 to 8 in order.
pub fn run_all(profile: Profile) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(_, check)| {
            let c = check(profile);
            log::info!("{c}");
            c
        })
        .collect()
}
