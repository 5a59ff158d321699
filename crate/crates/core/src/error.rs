use crate::interval::IntervalLattice;

/// Errors produced by oracles, algorithms, and verifiers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A precondition on arguments was violated (overlapping triples,
    /// out-of-range nodes, malformed ground sets, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numeric computation degenerated: ill-conditioned conditioning
    /// block, non-positive conditional variance, failed factorization.
    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    /// The sample oracle was asked to condition on more variables than
    /// the sample size supports.
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    /// The oracle cannot answer this form of query (e.g. block queries
    /// against the sample oracle).
    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),

    /// The interval inputs to the uncovered-set search were found to
    /// overlap while counting.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// A decomposition produced overlapping lattices, which signals a
    /// non-compositional oracle or inconsistent (noisy) answers.
    #[error("decomposition inconsistency: lattices {0} and {1} overlap")]
    DecompositionInconsistency(IntervalLattice, IntervalLattice),

    /// A computed lattice failed the supremum consistency check of the
    /// theory (some element of the seed is not independent of the node
    /// given the computed boundary).
    #[error("lattice inconsistency: {0}")]
    LatticeInconsistency(String),

    /// Random generation failed after the retry budget.
    #[error("generation failure: {0}")]
    GenerationFailure(String),

    /// A blanket family that should be an interval is not one; the
    /// oracle does not behave like a graphoid.
    #[error("non-graphoid behavior: {0}")]
    NonGraphoidBehavior(String),

    /// A brute-force grouping that should be an interval is not one;
    /// the oracle is not compositional.
    #[error("non-compositional oracle: {0}")]
    NonCompositionalOracle(String),

    /// An exhaustive computation would exceed its size guard.
    #[error("too large: {0}")]
    TooLarge(String),

    /// An input file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
