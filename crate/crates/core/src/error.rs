use thiserror::Error;

/// Errors shared by every module of the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A configured enumeration or search budget was exceeded.
    #[error("capacity exceeded for budget `{budget}` (limit {limit}): {detail}")]
    Capacity {
        budget: &'static str,
        limit: u64,
        detail: String,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("elements belong to different presentations ({left} vs {right})")]
    CrossPresentation { left: String, right: String },

    /// The partition does not satisfy the quotient-metric realizability condition.
    #[error("partition is not realizable: blocks {from_block} -> {to_block} from point {point}")]
    NotRealizable {
        from_block: usize,
        to_block: usize,
        point: usize,
    },

    #[error("no code found after {attempts} attempts (best minimum distance {best_distance})")]
    CodeSearchExhausted { attempts: u32, best_distance: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn capacity(budget: &'static str, limit: u64, detail: impl Into<String>) -> Self {
        Error::Capacity {
            budget,
            limit,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
