use thiserror::Error;

use crate::model::{AgentId, Violation};

/// Errors returned by the library. Verdicts such as "no stable matching exists"
/// are ordinary return values; `Unsolvable` is only used where a solvable
/// instance is a precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("agent {to} is not acceptable to agent {from}")]
    NotAcceptable { from: AgentId, to: AgentId },
    #[error("instance contains ties; this operation needs strict preference lists")]
    TiesPresent,
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("instance admits no stable matching")]
    Unsolvable,
    #[error("preference list of length {found} exceeds the supported bound {allowed}")]
    DegreeTooHigh { found: usize, allowed: usize },
    #[error("enumeration cap exceeded after {found} stable matchings")]
    CapExceeded { found: usize },
    #[error(
        "instance has {size} agents/variables, above the guard of {guard}; use force to override"
    )]
    SizeGuardExceeded { size: usize, guard: usize },
    #[error("search budget exhausted after {nodes} nodes")]
    Timeout { nodes: u64 },
    #[error("graph is not cubic: {0}")]
    NotCubic(String),
    #[error("vertex set is not a vertex cover: edge {0}-{1} uncovered")]
    NotACover(usize, usize),
    #[error("matching is not stable ({0} blocking edges)")]
    NotStable(usize),
    #[error("assignment leaves clause {0} unsatisfied")]
    NotSatisfying(usize),
    #[error("malformed formula: {0}")]
    MalformedFormula(String),
    #[error("malformed matching: {0}")]
    MalformedMatching(String),
    #[error("variable {var} occurs {count} times {polarity}, above the bound")]
    OccurrenceBound {
        var: usize,
        polarity: Polarity,
        count: usize,
    },
    #[error("min-weight subroutine returned weight {got}, above twice the optimum {optimum}")]
    ContractViolation { got: u64, optimum: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid instance: {}", display_violations(.0))]
    Validation(Vec<Violation>),
    #[error("invalid instance: {}", display_located(.0))]
    ValidationAt(Vec<(usize, Violation)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarity::Positive => f.write_str("unnegated"),
            Polarity::Negative => f.write_str("negated"),
        }
    }
}

fn display_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn display_located(v: &[(usize, Violation)]) -> String {
    v.iter()
        .map(|(line, x)| format!("line {line}: {x}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
