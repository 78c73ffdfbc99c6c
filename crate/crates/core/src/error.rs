//! Crate-wide error type.

/// Errors produced by every layer of the toolkit.
///
/// The CLI maps these onto its exit-code contract: input, parse, modulus
/// and unsupported errors are usage problems (exit 2); numerical and
/// capacity errors are computational failures (exit 3).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Malformed arguments: dimension mismatches, negative epsilons, bad ranges.
    #[error("input error: {0}")]
    Input(String),

    /// Malformed or schema-violating JSON. Messages are path-qualified
    /// (`pieces[3].a: ...`) where the violation sits inside a document.
    #[error("parse error: {0}")]
    Parse(String),

    /// A candidate modulus function does not vanish at the origin.
    #[error("modulus error: h(0) = {value}, expected 0")]
    Modulus { value: f64 },

    /// The LP kernel gave up (iteration cap) or an internal solve returned
    /// a status that the caller's construction rules out.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Vertex enumeration refused an oversized instance.
    #[error("capacity error: {pieces} pieces exceeds the vertex enumeration limit of {limit}")]
    Capacity { pieces: usize, limit: usize },

    /// The requested check is not defined for the given inputs
    /// (e.g. a distance-bound condition with a non-ball modulus).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
