//! Conditional-independence answering through lattices and CI
//! enumeration from a decomposition.

use crate::error::{Error, Result};
use crate::interval::IntervalLattice;
use crate::lattice::{compute_mb, Decomposition};
use crate::oracle::IndependenceOracle;
use crate::triple::CITriple;
use crate::varset::VarSet;

/// One boundary computed while deciding a CI query: the boundary of `a`
/// relative to `C ∪ {b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct BoundaryWitness {
    pub a: usize,
    pub b: usize,
    pub boundary: VarSet,
}

/// The outcome of a lattice-based CI check.
///
/// The query is independent exactly when every recorded boundary is a
/// subset of the conditioning set.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CIVerdict {
    pub independent: bool,
    pub witnesses: Vec<BoundaryWitness>,
    pub total_queries: u64,
}

/// Decides the elementary relation `j ⫫ i | C` through the boundary
/// criterion: independent iff `m(j; C ∪ {i}) ⊆ C`.
pub fn elementary_ci_check<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    i: usize,
    c: VarSet,
) -> Result<CIVerdict> {
    oracle.ground().check_node(j)?;
    oracle.ground().check_node(i)?;
    oracle.ground().check_set(c)?;
    if j == i || c.contains(j) || c.contains(i) {
        return Err(Error::InvalidArgument(format!(
            "elementary CI check needs distinct j={j}, i={i} outside C={c:?}"
        )));
    }
    let before = oracle.query_count();
    let boundary = compute_mb(oracle, j, c.with(i))?;
    let independent = boundary.is_subset(c);

    // Membership form of the same criterion, cross-checked in debug
    // builds: the lattice [m, M] of the seed C ∪ {i} has i in M - m and
    // C in [m, M - i] exactly when the relation holds.
    #[cfg(debug_assertions)]
    {
        let lat = crate::lattice::compute_lattice(oracle, j, c.with(i))?;
        let membership = lat.free().contains(i)
            && lat.minimum().is_subset(c)
            && c.is_subset(lat.maximum().without(i));
        debug_assert_eq!(
            membership, independent,
            "membership and boundary forms disagree for j={j} i={i} C={c:?}"
        );
    }

    Ok(CIVerdict {
        independent,
        witnesses: vec![BoundaryWitness { a: j, b: i, boundary }],
        total_queries: oracle.query_count() - before,
    })
}

/// Decides a general relation `A ⫫ B | C` by reduction to boundaries:
/// independent iff `m(a; C ∪ {b}) ⊆ C` for every `a ∈ A`, `b ∈ B`.
/// Pairs are evaluated in ascending `(a, b)` order with a short-circuit
/// on the first failure; the verdict records every boundary computed.
pub fn general_ci_query<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    triple: &CITriple,
) -> Result<CIVerdict> {
    oracle.ground().check_set(triple.a())?;
    oracle.ground().check_set(triple.b())?;
    oracle.ground().check_set(triple.c())?;
    let before = oracle.query_count();
    let c = triple.c();
    let mut witnesses = Vec::new();
    let mut independent = true;
    'outer: for a in triple.a().iter() {
        for b in triple.b().iter() {
            let boundary = compute_mb(oracle, a, c.with(b))?;
            witnesses.push(BoundaryWitness { a, b, boundary });
            if !boundary.is_subset(c) {
                independent = false;
                break 'outer;
            }
        }
    }
    Ok(CIVerdict {
        independent,
        witnesses,
        total_queries: oracle.query_count() - before,
    })
}

/// The elementary CI statements `j ⫫ i | C` encoded by a decomposition:
/// per lattice `[m, M]`, every `i ∈ M - m` with every `C ∈ [m, M - i]`.
#[derive(Debug, Clone)]
pub struct CIEnumeration {
    j: usize,
    lattices: Vec<IntervalLattice>,
    count: u128,
    partial: bool,
}

/// Builds the enumeration for a decomposition. For an incomplete
/// (sparse) decomposition the stream is the partial enumeration and the
/// count carries a partial flag.
pub fn enumerate_ci(dec: &Decomposition) -> CIEnumeration {
    let lattices: Vec<IntervalLattice> = dec.lattices().to_vec();
    let count = lattices
        .iter()
        .map(|l| {
            let f = l.free().len() as u128;
            if f == 0 {
                0
            } else {
                f << (f - 1)
            }
        })
        .sum();
    CIEnumeration {
        j: dec.node(),
        lattices,
        count,
        partial: !dec.complete(),
    }
}

impl CIEnumeration {
    pub fn node(&self) -> usize {
        self.j
    }

    /// Total number of statements the stream yields (the closed-form
    /// count `Σ (|M|-|m|) 2^(|M|-|m|-1)`).
    pub fn count(&self) -> u128 {
        self.count
    }

    /// True when the underlying decomposition was incomplete, so the
    /// stream enumerates only the covered part.
    pub fn is_partial(&self) -> bool {
        self.partial
    }

    /// Streams the statements lazily: lattice discovery order, then
    /// ascending `i`, then conditioning sets by size then
    /// lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = (usize, VarSet)> + '_ {
        self.lattices.iter().flat_map(|l| {
            let m = l.minimum();
            l.free().iter().flat_map(move |i| {
                let others = l.free().without(i);
                others
                    .subsets_up_to_size(others.len())
                    .into_iter()
                    .map(move |extra| (i, m.union(extra)))
            })
        })
    }
}

/// The number of possible elementary triples `(j, i, C)` for a fixed
/// node `j` over `d` nodes: `(d-1) 2^(d-2)`.
pub fn count_possible_ci(d: usize) -> Result<u128> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two nodes for an elementary CI statement, got d = {d}"
        )));
    }
    Ok((d as u128 - 1) << (d - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::full_decomposition;
    use crate::oracle::elementary_query;
    use crate::oracles::{non_graphical_gaussian, studeny_graphoid, UndirectedGraph};
    use std::collections::BTreeSet;

    fn set(v: &[usize]) -> VarSet {
        VarSet::from_indices(v.iter().copied())
    }

    #[test]
    fn elementary_check_on_path() {
        let g = UndirectedGraph::path(5).unwrap();
        let o = g.separation_oracle();
        // 1-indexed: j=1, i=5, C={3} with witness boundary {3}
        let v = elementary_ci_check(&o, 0, 4, set(&[2])).unwrap();
        assert!(v.independent);
        assert_eq!(v.witnesses, vec![BoundaryWitness { a: 0, b: 4, boundary: set(&[2]) }]);
        assert!(v.total_queries > 0);
    }

    #[test]
    fn elementary_check_on_non_graphical_gaussian() {
        let spec = non_graphical_gaussian();
        let o = spec.exact_oracle();
        // 5 ⫫ 6 | ∅ with witness boundary ∅
        let v = elementary_ci_check(&o, 4, 5, VarSet::EMPTY).unwrap();
        assert!(v.independent);
        assert_eq!(v.witnesses[0].boundary, VarSet::EMPTY);
        // 5 and 6 dependent given 7
        let v = elementary_ci_check(&o, 4, 5, set(&[6])).unwrap();
        assert!(!v.independent);
    }

    #[test]
    fn general_query_on_path() {
        let g = UndirectedGraph::path(5).unwrap();
        let o = g.separation_oracle();
        // A={1}, B={4,5}, C={3}: both pair boundaries are {3}
        let t = CITriple::new(set(&[0]), set(&[3, 4]), set(&[2])).unwrap();
        let v = general_ci_query(&o, &t).unwrap();
        assert!(v.independent);
        assert_eq!(v.witnesses.len(), 2);
        assert!(v.witnesses.iter().all(|w| w.boundary == set(&[2])));

        // A={1,2}, B={4,5}, C=∅: adjacent chain segments
        let t = CITriple::new(set(&[0, 1]), set(&[3, 4]), VarSet::EMPTY).unwrap();
        let v = general_ci_query(&o, &t).unwrap();
        assert!(!v.independent);
    }

    #[test]
    fn verdicts_match_oracle_exhaustively() {
        for (name, oracle) in [
            ("path4", UndirectedGraph::path(4).unwrap().separation_oracle()),
            ("random5", crate::random::random_graph(5, 0.5, 4).unwrap().separation_oracle()),
        ] {
            let d = oracle.ground().size();
            for j in 0..d {
                for i in 0..d {
                    if i == j {
                        continue;
                    }
                    for c in oracle.ground().all().without(i).without(j).subsets() {
                        let direct = elementary_query(&oracle, j, i, c).unwrap();
                        let v = elementary_ci_check(&oracle, j, i, c).unwrap();
                        assert_eq!(v.independent, direct, "{name}: j={j} i={i} C={c:?}");
                    }
                }
            }
        }
        // the Studeny table, through the same criterion
        let t = studeny_graphoid();
        let o = t.oracle();
        for j in 0..4 {
            for i in 0..4 {
                if i == j {
                    continue;
                }
                for c in o.ground().all().without(i).without(j).subsets() {
                    let direct = elementary_query(&o, j, i, c).unwrap();
                    let v = elementary_ci_check(&o, j, i, c).unwrap();
                    assert_eq!(v.independent, direct, "studeny: j={j} i={i} C={c:?}");
                }
            }
        }
    }

    #[test]
    fn block_queries_match_separation_semantics() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(31);
        for seed in 0..25u64 {
            let d = 4 + (seed % 5) as usize;
            let g = crate::random::random_graph(d, 0.45, 500 + seed).unwrap();
            let o = g.separation_oracle();
            // random disjoint triple with nonempty A, B
            let mut a = VarSet::EMPTY;
            let mut b = VarSet::EMPTY;
            let mut c = VarSet::EMPTY;
            for node in 0..d {
                match rng.random_range(0..4) {
                    0 => a = a.with(node),
                    1 => b = b.with(node),
                    2 => c = c.with(node),
                    _ => {}
                }
            }
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let t = CITriple::new(a, b, c).unwrap();
            let v = general_ci_query(&o, &t).unwrap();
            assert_eq!(v.independent, o.query(a, b, c).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn enumeration_on_path3() {
        let g = UndirectedGraph::path(3).unwrap();
        let o = g.separation_oracle();

        // middle node: every lattice is a point, no statements
        let dec = full_decomposition(&o, 1).unwrap();
        let e = enumerate_ci(&dec);
        assert_eq!(e.count(), 0);
        assert_eq!(e.iter().count(), 0);
        assert!(!e.is_partial());

        // endpoint: exactly one statement, 1 ⫫ 3 | {2}
        let dec = full_decomposition(&o, 0).unwrap();
        let e = enumerate_ci(&dec);
        assert_eq!(e.count(), 1);
        assert_eq!(e.iter().collect::<Vec<_>>(), vec![(2, set(&[1]))]);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for seed in [1u64, 6, 11] {
            let g = crate::random::random_graph(6, 0.5, seed).unwrap();
            let o = g.separation_oracle();
            for j in 0..6 {
                let dec = full_decomposition(&o, j).unwrap();
                let e = enumerate_ci(&dec);
                let streamed: Vec<(usize, VarSet)> = e.iter().collect();
                let unique: BTreeSet<_> = streamed.iter().copied().collect();
                assert_eq!(streamed.len(), unique.len(), "duplicates for j={j}");
                assert_eq!(streamed.len() as u128, e.count());
                let mut brute = BTreeSet::new();
                for i in 0..6 {
                    if i == j {
                        continue;
                    }
                    for c in o.ground().all().without(i).without(j).subsets() {
                        if elementary_query(&o, j, i, c).unwrap() {
                            brute.insert((i, c));
                        }
                    }
                }
                assert_eq!(unique, brute, "statement sets differ for j={j}");
            }
        }
    }

    #[test]
    fn possible_ci_counts() {
        assert_eq!(count_possible_ci(15).unwrap(), 114_688);
        assert_eq!(count_possible_ci(2).unwrap(), 1);
        assert_eq!(count_possible_ci(4).unwrap(), 12);
        assert!(count_possible_ci(1).is_err());
    }
}
