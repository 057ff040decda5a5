use alloc::string::String;
use core::fmt;

/// Errors shared across the crate. Budget overruns carry the size that
/// would have been needed so callers can report or re-run with a larger
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A construction would exceed a configured size budget.
    SizeExceeded {
        what: &'static str,
        required: u128,
        budget: u128,
    },
    /// Face enumeration hit the face budget.
    FaceBudget { budget: usize },
    /// Search exhausted its deterministic step budget.
    StepBudget { steps: u64 },
    /// Chromatic operations reject graphs with loops.
    LoopedGraph,
    /// A precondition on the inputs does not hold.
    Precondition(String),
    /// Duplicate vertex label in a graph description.
    DuplicateLabel(String),
    /// An edge or loop references a label that was never declared.
    UnknownLabel(String),
    /// A returned witness failed its own validation; indicates a bug in the
    /// construction that produced it.
    InternalCheck(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SizeExceeded {
                what,
                required,
                budget,
            } => write!(f, "{what} needs {required} but the budget is {budget}"),
            Error::FaceBudget { budget } => {
                write!(f, "face enumeration exceeded the budget of {budget}")
            }
            Error::StepBudget { steps } => {
                write!(f, "search exceeded the step budget of {steps}")
            }
            Error::LoopedGraph => write!(f, "operation is undefined on graphs with loops"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::DuplicateLabel(l) => write!(f, "duplicate vertex label {l:?}"),
            Error::UnknownLabel(l) => write!(f, "unknown vertex label {l:?}"),
            Error::InternalCheck(msg) => write!(f, "internal consistency check failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
