use std::fmt;

use seedtopic::analytics::AnalyticsError;
use seedtopic::io::IoError;
use seedtopic::model::ModelError;
use seedtopic::text::PipelineError;

/// Process exit status by failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Other = 1,
    Config = 2,
    Data = 3,
    Invariant = 4,
    CheckFailed = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub class: ExitClass,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(class: ExitClass, error: impl Into<anyhow::Error>) -> Self {
        Self {
            class,
            error: error.into(),
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Self::new(ExitClass::Config, anyhow::anyhow!("{msg}"))
    }

    pub fn data(msg: impl fmt::Display) -> Self {
        Self::new(ExitClass::Data, anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CmdResult<T> = Result<T, Failure>;

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let class = match &e {
            ModelError::Invariant(_) => ExitClass::Invariant,
            ModelError::Params(_) => ExitClass::Config,
            _ => ExitClass::Data,
        };
        Self::new(class, e)
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let class = match e {
            PipelineError::Config(_) => ExitClass::Config,
            _ => ExitClass::Data,
        };
        Self::new(class, e)
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let class = match e {
            IoError::Io { .. } => ExitClass::Other,
            _ => ExitClass::Data,
        };
        Self::new(class, e)
    }
}

impl From<AnalyticsError> for Failure {
    fn from(e: AnalyticsError) -> Self {
        Self::new(ExitClass::Data, e)
    }
}

pub trait Classify<T> {
    fn class(self, class: ExitClass) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn class(self, class: ExitClass) -> CmdResult<T> {
        self.map_err(|e| Failure::new(class, e))
    }
}
