use crate::error::{Error, Result};
use crate::varset::VarSet;

/// A conditional-independence triple `(A, B, C)`: the query "is A
/// independent of B given C?". `A` and `B` must be nonempty and the three
/// sets pairwise disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CITriple {
    a: VarSet,
    b: VarSet,
    c: VarSet,
}

impl CITriple {
    pub fn new(a: VarSet, b: VarSet, c: VarSet) -> Result<CITriple> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidArgument(
                "A and B must be nonempty in a CI triple".into(),
            ));
        }
        check_disjoint(a, b, c)?;
        Ok(CITriple { a, b, c })
    }

    pub fn a(&self) -> VarSet {
        self.a
    }

    pub fn b(&self) -> VarSet {
        self.b
    }

    pub fn c(&self) -> VarSet {
        self.c
    }
}

/// Validates pairwise disjointness of a query triple; `A` or `B` may be
/// empty here (triviality queries are legal at the oracle level).
pub fn check_disjoint(a: VarSet, b: VarSet, c: VarSet) -> Result<()> {
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::InvalidArgument(format!(
            "query sets must be pairwise disjoint: A={a:?} B={b:?} C={c:?}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_overlapping() {
        let a = VarSet::from_indices([0]);
        let b = VarSet::from_indices([1]);
        assert!(CITriple::new(a, VarSet::EMPTY, b).is_err());
        assert!(CITriple::new(VarSet::EMPTY, b, a).is_err());
        assert!(CITriple::new(a, a, VarSet::EMPTY).is_err());
        assert!(CITriple::new(a, b, b).is_err());
        assert!(CITriple::new(a, b, VarSet::from_indices([2])).is_ok());
    }
}
