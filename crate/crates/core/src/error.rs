use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (zero vector,
    /// non-root, wrong dimension).
    #[error("domain error: {0}")]
    Domain(String),

    /// A Cartan matrix that is not of finite type.
    #[error("Cartan matrix is not of finite type: {reason}")]
    NotFiniteType {
        reason: String,
        /// Size of the first leading principal minor of the symmetrized form
        /// that is not positive, when that is the failure.
        minor_size: Option<usize>,
        minor_value: Option<String>,
    },

    /// Enumeration refused because the group (or orbit) is too large.
    #[error("enumeration bound exceeded: estimated order {estimated} exceeds cap {cap} ({what})")]
    BoundExceeded { what: String, estimated: u128, cap: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Something the mathematics guarantees did not happen.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Shortest-vector enumeration gave up.
    #[error("enumeration refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
