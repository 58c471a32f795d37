use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A system definition violates one of its invariants. `path` names the
    /// offending field in the definition-file layout (e.g. `pieces[1].interval`).
    #[error("invalid system at `{path}`: {message}")]
    InvalidSystem { path: String, message: String },

    #[error("point {point} is outside the system's domain")]
    OutOfDomain { point: String },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("region variant does not match the system family")]
    RegionMismatch,

    #[error("iterate f^{iterate} needs {required} pieces, above the cap of {cap}")]
    PieceCapExceeded {
        iterate: usize,
        required: usize,
        cap: usize,
    },

    #[error("point {point} is not periodic within {bound} iterates")]
    NotPeriodic { point: String, bound: usize },

    #[error("no periodic point of minimal period >= {min_period} found; last iterate tried m = {last_m}")]
    NotFoundWithinCap { min_period: usize, last_m: usize },

    #[error("orbit did not repeat within {cap} iterates")]
    CapExceeded { cap: usize },

    #[error("no n <= {cap} with f^n(V) meeting W")]
    ExceedsCap { cap: usize },

    #[error("breakpoint partition is not Markov: image of cell {cell} [{lo}, {hi}] is not a union of cells")]
    NotMarkov { cell: usize, lo: String, hi: String },

    #[error("region {region} could not be captured by a cell path within depth {depth}")]
    RefinementCapExceeded { region: usize, depth: usize },

    #[error("cannot certify: {0}")]
    NotCertified(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidSystem {
            path: path.into(),
            message: message.into(),
        }
    }
}
