use std::fmt;

use thiserror::Error;

/// One violated condition, with the place it was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub location: String,
    pub message: String,
}

/// Accumulated validation failures. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub issues: Vec<Issue>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue { location: location.into(), message: message.into() });
    }

    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    /// True if some issue message contains `needle`.
    pub fn mentions(&self, needle: &str) -> bool {
        self.issues.iter().any(|i| i.message.contains(needle))
    }

    pub fn into_result(self) -> Result<(), Report> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", issue.location, issue.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("letter {letter} out of range for rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },
    #[error("the identity has no conjugacy class")]
    IdentityWord,
    #[error("invalid coset table:\n{0}")]
    InvalidTable(Report),
    #[error("word {0} is not in the subgroup")]
    NotMember(String),
    #[error("elevations collide: {0}")]
    ElevationCollision(String),
    #[error("pair is not malnormal: {0}")]
    NotMalnormal(String),
    #[error("invalid graph of groups:\n{0}")]
    InvalidGraph(Report),
    #[error("invalid precover:\n{0}")]
    InvalidPrecover(Report),
    #[error("duplicate conjugacy class {class} at vertex {vertex}")]
    DuplicateClass { vertex: String, class: String },
    #[error("vertex {0} is cyclic; its induced pair is degenerate")]
    DegenerateVertex(String),
    #[error("disconnected")]
    Disconnected,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0}")]
    Surgery(String),
    #[error("malformed graph-of-groups word: {0}")]
    MalformedPath(String),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("not found during {stage}: {reason}")]
    NotFound { stage: String, reason: String },
}

impl Error {
    pub fn not_found(stage: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::NotFound { stage: stage.into(), reason: reason.into() }
    }

    pub fn is_not_found(&self) -> bool {
        matches!(self, Error::NotFound { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
