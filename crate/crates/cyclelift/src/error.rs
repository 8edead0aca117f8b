use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The standing hypotheses on the field, the quaternion discriminant or
    /// the prime do not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A valuation could not be decided at the working precision.
    #[error("precision exhausted: need at least {needed}, working precision is {available}")]
    PrecisionExhausted { needed: u32, available: u32 },

    /// A series coefficient beyond the truncation bound was required.
    #[error("truncation insufficient: exponent {needed} requested, series known up to {available}")]
    TruncationInsufficient { needed: u64, available: u64 },

    /// No prime with the requested properties below the bound.
    #[error("search bound {bound} exhausted")]
    SearchBoundExhausted { bound: u64 },

    /// Breadth-first search gave up before reaching the target vertex.
    #[error("search radius {cap} exceeded")]
    SearchRadiusExceeded { cap: u32 },

    /// The vector is isotropic (within precision) where an anisotropic one is required.
    #[error("degenerate vector: q(b) vanishes")]
    DegenerateVector,

    /// The two lattices are not neighbours in the tree.
    #[error("lattices are not adjacent")]
    NotAdjacent,

    /// The special homomorphism does not lie in the lattice.
    #[error("vector is not contained in the lattice")]
    EmptyIntersection,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
