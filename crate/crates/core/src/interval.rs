use std::fmt;

use crate::error::{Error, Result};
use crate::varset::VarSet;

/// An interval `[m, M]` of the subset lattice: all sets `U` with
/// `m ⊆ U ⊆ M`. A convex sublattice of the powerset ordered by inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct IntervalLattice {
    m: VarSet,
    max: VarSet,
}

impl IntervalLattice {
    pub fn new(m: VarSet, max: VarSet) -> Result<IntervalLattice> {
        if !m.is_subset(max) {
            return Err(Error::InvalidArgument(format!(
                "interval minimum {m:?} not contained in maximum {max:?}"
            )));
        }
        Ok(IntervalLattice { m, max })
    }

    /// The singleton interval `[s, s]`.
    pub fn point(s: VarSet) -> IntervalLattice {
        IntervalLattice { m: s, max: s }
    }

    pub fn minimum(&self) -> VarSet {
        self.m
    }

    pub fn maximum(&self) -> VarSet {
        self.max
    }

    /// Free positions: members of the maximum that are not forced by the
    /// minimum.
    pub fn free(&self) -> VarSet {
        self.max.difference(self.m)
    }

    /// Number of subsets covered: `2^(|M|-|m|)`.
    pub fn cardinality(&self) -> u128 {
        1u128 << self.free().len()
    }

    pub fn contains(&self, u: VarSet) -> bool {
        self.m.is_subset(u) && u.is_subset(self.max)
    }

    /// Every member of the interval, smallest first.
    pub fn members(&self) -> impl Iterator<Item = VarSet> + '_ {
        let m = self.m;
        self.free().subsets().map(move |f| m.union(f))
    }

    /// Whether two intervals share any subset. `[m1,M1] ∩ [m2,M2]` is the
    /// interval `[m1∪m2, M1∩M2]`, nonempty exactly when that pair nests.
    pub fn intersects(&self, other: &IntervalLattice) -> bool {
        self.m.union(other.m).is_subset(self.max.intersection(other.max))
    }
}

impl fmt::Display for IntervalLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.m, self.max)
    }
}
