use thiserror::Error;

use crate::network::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown variable index {0}")]
    UnknownVariable(usize),

    #[error("too many variables: {n} (limit {limit})")]
    TooManyVariables { n: usize, limit: usize },

    #[error("ranking table has {got} entries, expected {expected}")]
    WrongTableSize { got: usize, expected: usize },

    #[error("ranking is not normalized (minimum rank {0})")]
    NotNormalized(String),

    #[error("ranking has no finite world")]
    DegenerateRanking,

    #[error("cannot condition on a proposition of infinite rank")]
    ImpossibleCondition,

    #[error("rank arithmetic: {0}")]
    RankArithmetic(&'static str),

    #[error("invalid network: {}", join(.0))]
    InvalidNetwork(Vec<Diagnostic>),

    #[error("action conjunct is empty")]
    EmptyAction,

    #[error("inconsistent action conjunct on variable {0}")]
    InconsistentAction(usize),

    #[error("invalid post-action ranking: proposition has rank {0}, expected 0")]
    InvalidPostRanking(String),

    #[error("utility level {0} outside the three-level range")]
    LevelOutOfRange(i64),

    #[error("ambiguous utility at level {0} cannot be compared under the strict policy")]
    StrictAmbiguity(u64),

    #[error("utility ranking covers {utility} variables but the network has {network}")]
    VariableMismatch { network: usize, utility: usize },

    #[error("exponent estimate {value} is not close to an integer")]
    AmbiguousExponent { value: f64 },

    #[error("invalid epsilon model: {0}")]
    InvalidEpsilon(String),

    #[error("contradictory observation: {0} has infinite rank under the current belief")]
    ContradictoryObservation(String),
}

fn join(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}
