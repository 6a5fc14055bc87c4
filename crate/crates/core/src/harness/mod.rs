//! Loss streams, comparators, run evaluation and the verification suites.

pub mod comparator;
mod monitor;
pub mod rng;
mod run;
pub mod stream;
pub mod suites;

use thiserror::Error;

use crate::learners::LearnerError;

pub use comparator::{best_fixed, best_portfolio, BestFixed};
pub use monitor::Violation;
pub use rng::StreamRng;
pub use run::{evaluate_run, ComparatorResult, ExperimentRecord, RoundRecord, RunOptions, RunSpec};
pub use stream::{LossStream, StreamData, StreamKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("stream: {0}")]
    Stream(String),
    #[error("comparator: {0}")]
    Comparator(String),
    #[error("configuration: {0}")]
    Config(#[source] LearnerError),
    #[error("round {round}: {source}")]
    Learner {
        round: usize,
        #[source]
        source: LearnerError,
    },
    #[error("round {round}: non-finite {what}")]
    Numeric { round: usize, what: String },
}

impl HarnessError {
    /// Numeric failures, as opposed to bad configuration.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            HarnessError::Numeric { .. }
                | HarnessError::Learner { source: LearnerError::NonFinite { .. } | LearnerError::ZeroWealth { .. }, .. }
                | HarnessError::Learner { source: LearnerError::Iso(_), .. }
        )
    }
}
