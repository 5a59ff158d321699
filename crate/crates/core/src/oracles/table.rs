use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::oracle::{validate_query, IndependenceOracle, QueryCounter};
use crate::varset::VarSet;

/// An independence model given by an explicit list of triples declared
/// independent.
///
/// Triples are stored canonically (the `{A,B}` pair sorted), so the
/// model is closed under symmetry by construction; triviality instances
/// `(A, ∅, C)` are implicit and never stored.
#[derive(Debug, Clone)]
pub struct TableGraphoid {
    ground: GroundSet,
    relations: BTreeSet<(VarSet, VarSet, VarSet)>,
}

fn canonical(a: VarSet, b: VarSet, c: VarSet) -> (VarSet, VarSet, VarSet) {
    if a <= b {
        (a, b, c)
    } else {
        (b, a, c)
    }
}

impl TableGraphoid {
    pub fn new(ground: GroundSet, relations: &[(VarSet, VarSet, VarSet)]) -> Result<TableGraphoid> {
        let mut stored = BTreeSet::new();
        for &(a, b, c) in relations {
            ground.check_set(a)?;
            ground.check_set(b)?;
            ground.check_set(c)?;
            crate::triple::check_disjoint(a, b, c)?;
            if a.is_empty() || b.is_empty() {
                return Err(Error::InvalidArgument(
                    "triviality relations are implicit; do not list triples with an empty side".into(),
                ));
            }
            stored.insert(canonical(a, b, c));
        }
        Ok(TableGraphoid { ground, relations: stored })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    /// Nontrivial relations, canonicalized, in sorted order.
    pub fn relations(&self) -> impl Iterator<Item = &(VarSet, VarSet, VarSet)> {
        self.relations.iter()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn oracle(&self) -> TableOracle {
        TableOracle {
            table: self.clone(),
            count: QueryCounter::default(),
        }
    }
}

/// Lookup oracle over a [`TableGraphoid`].
pub struct TableOracle {
    table: TableGraphoid,
    count: QueryCounter,
}

impl IndependenceOracle for TableOracle {
    fn ground(&self) -> &GroundSet {
        self.table.ground()
    }

    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        if let Some(t) = validate_query(self.ground(), a, b, c)? {
            self.count.bump();
            return Ok(t);
        }
        self.count.bump();
        Ok(self.table.relations.contains(&canonical(a, b, c)))
    }

    fn query_count(&self) -> u64 {
        self.count.get()
    }
}

/// The classical four-element compositional graphoid that is not
/// probabilistically representable: over `{a,b,c,d}`, exactly the
/// relations `a ⫫ b | {c,d}`, `c ⫫ d | {a}`, `c ⫫ d | {b}` and
/// `a ⫫ b | ∅` (plus symmetry and triviality).
pub fn studeny_graphoid() -> TableGraphoid {
    let ground = GroundSet::with_labels(vec!["a".into(), "b".into(), "c".into(), "d".into()])
        .expect("labels are distinct");
    let (a, b, c, d) = (
        VarSet::singleton(0),
        VarSet::singleton(1),
        VarSet::singleton(2),
        VarSet::singleton(3),
    );
    TableGraphoid::new(
        ground,
        &[
            (a, b, c.union(d)),
            (c, d, a),
            (c, d, b),
            (a, b, VarSet::EMPTY),
        ],
    )
    .expect("built-in relations are valid")
}
