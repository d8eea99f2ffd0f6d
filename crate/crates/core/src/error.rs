//! Error types, one per module boundary.
//!
//! Every error exposes a stable `code()` so callers (the CLI in particular)
//! can emit machine-readable diagnostics.

use thiserror::Error;

/// Invalid type models and impossible observations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("a world needs at least one type")]
    Empty,
    #[error("field lengths differ: {types} types, {prior} prior entries, {high_prob} conditionals")]
    LengthMismatch {
        types: usize,
        prior: usize,
        high_prob: usize,
    },
    #[error("prior sums to {sum}, not 1")]
    NonNormalizedPrior { sum: String },
    #[error("types {first} and {second} share the conditional {value}")]
    DuplicateConditional {
        first: usize,
        second: usize,
        value: String,
    },
    #[error("{field}[{index}] = {value} lies outside [0, 1]")]
    OutOfRangeProbability {
        field: &'static str,
        index: usize,
        value: String,
    },
    #[error("the observation has zero probability under this world")]
    ZeroProbabilityObservation,
    #[error("count {count} exceeds the number of signals {signals}")]
    CountOutOfRange { count: usize, signals: usize },
    #[error("degenerate world: {0}")]
    Degenerate(String),
}

impl WorldError {
    pub fn code(&self) -> &'static str {
        match self {
            WorldError::Empty => "EmptyWorld",
            WorldError::LengthMismatch { .. } => "LengthMismatch",
            WorldError::NonNormalizedPrior { .. } => "NonNormalizedPrior",
            WorldError::DuplicateConditional { .. } => "DuplicateConditional",
            WorldError::OutOfRangeProbability { .. } => "OutOfRangeProbability",
            WorldError::ZeroProbabilityObservation => "ZeroProbabilityObservation",
            WorldError::CountOutOfRange { .. } => "CountOutOfRange",
            WorldError::Degenerate(_) => "DegenerateWorld",
        }
    }
}

/// Malformed payment tables and mismatched evaluation requests.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("a scheme needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("payment for report {report} at count {count} is negative ({value})")]
    NegativePayment {
        report: usize,
        count: usize,
        value: String,
    },
    #[error("invalid coalition: {0}")]
    InvalidCoalition(String),
    #[error(transparent)]
    World(#[from] WorldError),
}

impl SchemeError {
    pub fn code(&self) -> &'static str {
        match self {
            SchemeError::TooFewAgents(_) => "TooFewAgents",
            SchemeError::DimensionMismatch { .. } => "DimensionMismatch",
            SchemeError::NegativePayment { .. } => "NegativePayment",
            SchemeError::InvalidCoalition(_) => "InvalidCoalition",
            SchemeError::World(e) => e.code(),
        }
    }
}

/// Failures of the linear-programming engine itself (not infeasibility,
/// which is a regular solver status).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed program: {0}")]
    MalformedProgram(String),
    #[error("{selections} disjunct selections exceed the guard of {guard}")]
    CombinatorialGuardExceeded { selections: u128, guard: u128 },
}

impl LpError {
    pub fn code(&self) -> &'static str {
        match self {
            LpError::MalformedProgram(_) => "MalformedProgram",
            LpError::CombinatorialGuardExceeded { .. } => "CombinatorialGuardExceeded",
        }
    }
}

/// Errors from the brute-force verifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("{0} agents is too many to enumerate all profiles (limit 20)")]
    PopulationTooLarge(usize),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl VerifyError {
    pub fn code(&self) -> &'static str {
        match self {
            VerifyError::PopulationTooLarge(_) => "PopulationTooLarge",
            VerifyError::Scheme(e) => e.code(),
        }
    }
}

impl From<WorldError> for VerifyError {
    fn from(e: WorldError) -> Self {
        VerifyError::Scheme(SchemeError::World(e))
    }
}

/// Errors from the scheme designers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("{scenario} needs at least {min} agents, got {n}")]
    TooFewAgents {
        scenario: &'static str,
        n: usize,
        min: usize,
    },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("{scenario} is infeasible for this instance")]
    Infeasible { scenario: String },
    #[error("degenerate world: {0}")]
    DegenerateWorld(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

impl DesignError {
    pub fn code(&self) -> &'static str {
        match self {
            DesignError::TooFewAgents { .. } => "TooFewAgents",
            DesignError::InvalidRequest(_) => "InvalidRequest",
            DesignError::Infeasible { .. } => "Infeasible",
            DesignError::DegenerateWorld(_) => "DegenerateWorld",
            DesignError::InternalContradiction(_) => "InternalContradiction",
            DesignError::World(e) => e.code(),
            DesignError::Scheme(e) => e.code(),
            DesignError::Lp(e) => e.code(),
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, DesignError::Infeasible { .. })
    }
}

/// Reading and writing world/scheme files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Number(#[from] crate::exact::ParseNumberError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl FormatError {
    pub fn code(&self) -> &'static str {
        match self {
            FormatError::Json(_) => "InvalidJson",
            FormatError::Number(_) => "InvalidNumber",
            FormatError::World(e) => e.code(),
            FormatError::Scheme(e) => e.code(),
        }
    }
}
