//! Crate-wide error taxonomy.
//!
//! Five families cover every failure mode the library distinguishes:
//! invalid arguments (caller bugs), resource limits (honest give-up with the
//! best partial answer attached), model violations (an algorithm broke a
//! capacity law of the computation model), malformed programs or strategies
//! (protocol breaches by user-supplied machines/queriers), and consistency
//! breaches (an internal cross-check that should be impossible failed).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which capacity law a machine broke. See [`crate::ampc`] for the laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityLaw {
    /// Sum of received values plus empty responses exceeded the capacity.
    QueryBudget,
    /// A machine emitted more key-value pairs than the capacity.
    WriteCount,
    /// More values than the capacity accumulated under one key.
    PerKeyCap,
}

impl std::fmt::Display for CapacityLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CapacityLaw::QueryBudget => write!(f, "query budget"),
            CapacityLaw::WriteCount => write!(f, "write count"),
            CapacityLaw::PerKeyCap => write!(f, "per-key cap"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on arguments was not met.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configured search or enumeration budget ran out. `partial` carries
    /// the best bounds established before giving up, when meaningful.
    #[error("resource limit exceeded: {what} (budget {budget}){}", partial_fmt(.lower, .upper))]
    ResourceLimit {
        what: String,
        budget: u64,
        /// Best proven lower bound on the answer, if any.
        lower: Option<u64>,
        /// Best established upper bound on the answer, if any.
        upper: Option<u64>,
    },

    /// An algorithm violated a capacity law of the computation model.
    #[error("model violation in round {round}, machine {machine}: {law}{}", detail_fmt(.detail))]
    ModelViolation {
        round: usize,
        machine: u64,
        law: CapacityLaw,
        detail: String,
    },

    /// A machine broke the step protocol (e.g. kept querying after finishing).
    #[error("malformed program (machine {machine}, round {round}): {detail}")]
    MalformedProgram {
        round: usize,
        machine: u64,
        detail: String,
    },

    /// A querier strategy broke the game protocol.
    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),

    /// An internal invariant that should be unbreakable failed.
    #[error("consistency breach: {0}")]
    ConsistencyBreach(String),

    /// The polynomial extraction found a key whose stored multiset admits
    /// more than one source attribution on a single input, which makes the
    /// assignment-sum construction non-Boolean. The offending algorithm must
    /// stamp values so that per-machine writes are distinguishable.
    #[error("ambiguous value sourcing in round {round} under key {key}: multiset {multiset} \
             has multiple consistent writer attributions on one input")]
    AmbiguousSourcing {
        round: usize,
        key: String,
        multiset: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

fn partial_fmt(lower: &Option<u64>, upper: &Option<u64>) -> String {
    match (lower, upper) {
        (Some(l), Some(u)) => format!("; best bounds [{l}, {u}]"),
        (Some(l), None) => format!("; best lower bound {l}"),
        (None, Some(u)) => format!("; best upper bound {u}"),
        (None, None) => String::new(),
    }
}

fn detail_fmt(detail: &str) -> String {
    if detail.is_empty() {
        String::new()
    } else {
        format!(" ({detail})")
    }
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Exit code for the command-line driver: invalid input/config is 3,
    /// model violations 2, resource exhaustion 4, everything else 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::MalformedProgram { .. } | Error::MalformedStrategy(_) => 3,
            Error::ModelViolation { .. } | Error::AmbiguousSourcing { .. } => 2,
            Error::ResourceLimit { .. } => 4,
            _ => 1,
        }
    }
}
