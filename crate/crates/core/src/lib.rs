//! Neighbourhood lattices and lattice decompositions of compositional
//! graphoids.
//!
//! A compositional graphoid is an abstract independence relation
//! `A ⫫ B | C` satisfying the graphoid axioms plus composition; graph
//! separation, Gaussian conditional independence, and certain explicit
//! tables are all instances. For a node `j`, the subsets of `V - {j}`
//! group into intervals `[m, M]` of the subset lattice on which the
//! Markov boundary of `j` is constant; these neighbourhood lattices
//! partition the powerset and encode every elementary independence
//! statement involving `j`.
//!
//! This crate provides:
//!
//! - oracle backends ([`oracles`]): undirected-graph separation, exact
//!   and sample Gaussian, and table lookup, behind one
//!   [`IndependenceOracle`] interface with query counting and an
//!   optional memoizing wrapper;
//! - the algorithms ([`lattice`]): grow-shrink Markov boundaries,
//!   neighbourhood lattices, a certified uncovered-set search, and the
//!   full and sparse lattice decompositions;
//! - CI answering and enumeration ([`ci`]): deciding arbitrary
//!   `A ⫫ B | C` through boundaries and streaming all statements
//!   encoded by a decomposition;
//! - graph utilities ([`graphtools`]): component-wise decompositions,
//!   closed forms on path graphs, and faithful-Gaussian generation;
//! - statistics ([`stats`]): exact and sample partial correlations,
//!   regression coefficients, and the sample-complexity recovery
//!   experiment;
//! - ground truth ([`verify`]): definitional brute-force computations
//!   and a graphoid-axiom checker, against which everything above is
//!   tested.

pub mod ci;
mod error;
pub mod graphtools;
mod ground;
mod interval;
pub mod lattice;
mod oracle;
pub mod oracles;
pub mod random;
pub mod stats;
mod triple;
mod varset;
pub mod verify;

pub use error::{Error, Result};
pub use ground::GroundSet;
pub use interval::IntervalLattice;
pub use oracle::{elementary_query, CachingOracle, IndependenceOracle};
pub use triple::CITriple;
pub use varset::VarSet;

/// Partial correlations with absolute value at most this are treated as
/// zero by the exact Gaussian oracle. Overridable per oracle; double
/// precision solves of well-conditioned systems up to 64x64 carry error
/// far below it.
pub const DEFAULT_TOL_CI: f64 = 1e-9;

/// Smallest admissible eigenvalue when validating positive definiteness.
pub const DEFAULT_EPS_PD: f64 = 1e-10;

/// Conditioning blocks with a larger condition number are rejected as
/// numerically degenerate.
pub const COND_LIMIT: f64 = 1e12;
