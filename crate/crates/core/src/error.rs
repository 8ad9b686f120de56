//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<A> = std::result::Result<A, Error>;

/// Everything that can go wrong while evaluating geometric or kinematic
/// quantities.
///
/// Scalar payloads are stored as `f64` regardless of the working scalar type
/// so the error type stays non-generic.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A curve parameter fell outside the closed domain of a path.
    #[error("parameter {value} outside path domain [{lo}, {hi}]")]
    OutsideDomain { value: f64, lo: f64, hi: f64 },

    /// A vector was not based at the point an operation required.
    #[error("vector based at {actual:?}, expected base {expected:?} (tolerance {tol:e})")]
    BasePointMismatch {
        expected: Vec<f64>,
        actual: Vec<f64>,
        tol: f64,
    },

    /// Two objects disagreed on dimension.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A connection coefficient, metric entry, path point or field value
    /// came out NaN or infinite.
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    /// A direction was null (or numerically indistinguishable from null),
    /// so the requested quantity is spread over all components and cannot
    /// be read off a single one.
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    /// A configuration was structurally unusable (missing metric, bad
    /// endpoint conditions, non-monotone time map, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A particle violated its own invariants (zero mass function,
    /// non-positive mass for a massive particle, ...).
    #[error("invalid particle: {0}")]
    InvalidParticle(String),

    /// A special-relativity spec violated its invariants (superluminal
    /// velocity, photon without energy, non-unit direction, ...).
    #[error("invalid special-relativity spec: {0}")]
    InvalidSpec(String),

    /// Two independent evaluations of the same quantity disagreed beyond
    /// tolerance. Surfaced to verification mode rather than silently
    /// returning one of the two values.
    #[error("internal consistency violated in {context}: {lhs} vs {rhs} (tolerance {tol:e})")]
    InconsistentInvariant {
        context: &'static str,
        lhs: f64,
        rhs: f64,
        tol: f64,
    },
}
