//! Markov boundaries, neighbourhood lattices, certified uncovered-set
//! search, and the full and sparse lattice decompositions.

use crate::error::{Error, Result};
use crate::interval::IntervalLattice;
use crate::oracle::{elementary_query, IndependenceOracle};
use crate::varset::VarSet;

/// Hard cap on `|V| - 1` for the full decomposition: completeness
/// accounting touches counts up to `2^(d-1)`.
pub const DEFAULT_DECOMPOSITION_CAP: usize = 30;

/// Computes the relative Markov boundary `m(j;S)`: the unique minimal
/// `U ⊆ S` with `j ⫫ S-U | U`, by grow-shrink.
///
/// The forward phase repeatedly adds every element of `S - m` currently
/// dependent on `j` given `m`, until a fixpoint; the backward phase
/// iterates over a snapshot of `m` in ascending index order and removes
/// `i` when `j ⫫ i | m-i`. The result is order-independent because the
/// boundary is unique over a compositional graphoid.
pub fn compute_mb<O: IndependenceOracle + ?Sized>(oracle: &O, j: usize, s: VarSet) -> Result<VarSet> {
    oracle.ground().check_node(j)?;
    oracle.ground().check_set(s)?;
    if s.contains(j) {
        return Err(Error::InvalidArgument(format!("node {j} may not appear in S={s:?}")));
    }
    let mut m = VarSet::EMPTY;
    loop {
        let mut grown = VarSet::EMPTY;
        for i in s.difference(m).iter() {
            if !elementary_query(oracle, j, i, m)? {
                grown = grown.with(i);
            }
        }
        if grown.is_empty() {
            break;
        }
        m = m.union(grown);
    }
    for i in m.to_vec() {
        if elementary_query(oracle, j, i, m.without(i))? {
            m = m.without(i);
        }
    }
    Ok(m)
}

/// Computes the neighbourhood lattice `[m, M]` of `j` relative to `S`:
/// `m = compute_mb(j, S)` and `M = S ∪ {k ∉ S∪{j} : j ⫫ k | m}`.
///
/// Afterwards every `k ∈ S - m` is verified to satisfy `j ⫫ k | m`,
/// which must hold over a compositional graphoid; a violation (possible
/// under a noisy oracle) is surfaced as [`Error::LatticeInconsistency`].
pub fn compute_lattice<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    s: VarSet,
) -> Result<IntervalLattice> {
    let m = compute_mb(oracle, j, s)?;
    let mut max = s;
    for k in oracle.ground().all_but(j).difference(s).iter() {
        if elementary_query(oracle, j, k, m)? {
            max = max.with(k);
        }
    }
    for k in s.difference(m).iter() {
        if !elementary_query(oracle, j, k, m)? {
            return Err(Error::LatticeInconsistency(format!(
                "j = {j}, seed S = {s:?}: element {k} of S is not independent of j given the boundary {m:?}"
            )));
        }
    }
    IntervalLattice::new(m, max)
}

fn subcube_size(low: VarSet, high: VarSet) -> u128 {
    1u128 << high.difference(low).len()
}

/// Exact number of points of the subcube `[low, high]` covered by the
/// intervals, assuming the intervals are pairwise disjoint. Errs if the
/// running count exceeds the subcube size, which certifies an overlap.
fn covered_in(lattices: &[IntervalLattice], low: VarSet, high: VarSet) -> Result<u128> {
    let size = subcube_size(low, high);
    let mut total = 0u128;
    for l in lattices {
        let lo = l.minimum().union(low);
        let hi = l.maximum().intersection(high);
        if lo.is_subset(hi) {
            total += subcube_size(lo, hi);
            if total > size {
                return Err(Error::InvariantViolation(format!(
                    "covered count exceeds subcube size in [{low:?}, {high:?}]; input intervals overlap"
                )));
            }
        }
    }
    Ok(total)
}

/// Produces a subset of `ground` contained in no input interval, or
/// `None` exactly when the intervals cover the whole powerset.
///
/// Maintains a search subcube `[low, high]`, initially `[∅, ground]`,
/// whose covered count is exact by interval disjointness. While free
/// positions remain it splits on the smallest free index, descending
/// into the exclude-branch first whenever that branch has a positive
/// deficit.
pub fn find_uncovered_set(lattices: &[IntervalLattice], ground: VarSet) -> Result<Option<VarSet>> {
    for l in lattices {
        if !l.maximum().is_subset(ground) {
            return Err(Error::InvalidArgument(format!(
                "interval {l} is not contained in the ground set {ground:?}"
            )));
        }
    }
    let mut low = VarSet::EMPTY;
    let mut high = ground;
    if covered_in(lattices, low, high)? == subcube_size(low, high) {
        return Ok(None);
    }
    while low != high {
        let i = high.difference(low).min().expect("free positions remain");
        let excl_high = high.without(i);
        if covered_in(lattices, low, excl_high)? < subcube_size(low, excl_high) {
            high = excl_high;
        } else {
            let incl_low = low.with(i);
            if covered_in(lattices, incl_low, high)? >= subcube_size(incl_low, high) {
                return Err(Error::InvariantViolation(
                    "both child subcubes are fully covered although the parent has a deficit; \
                     input intervals overlap"
                        .into(),
                ));
            }
            low = incl_low;
        }
    }
    Ok(Some(low))
}

/// Every subset of `ground` of cardinality at most `s` contained in no
/// interval, in size-then-lexicographic order. Direct enumeration with
/// an O(k) membership check per subset.
pub fn all_uncovered_up_to_size(
    lattices: &[IntervalLattice],
    ground: VarSet,
    s: usize,
) -> Vec<VarSet> {
    ground
        .subsets_up_to_size(s)
        .into_iter()
        .filter(|u| !lattices.iter().any(|l| l.contains(*u)))
        .collect()
}

/// A collection of pairwise-disjoint neighbourhood lattices for a fixed
/// node `j`; `complete` means they partition the powerset of `V_{-j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    j: usize,
    lattices: Vec<IntervalLattice>,
    complete: bool,
    sparse_order: Option<usize>,
}

impl Decomposition {
    /// Assembles a decomposition from parts, verifying that every
    /// lattice lies inside `V_{-j}` and that the lattices are pairwise
    /// disjoint; `complete` is derived from the covered count.
    pub fn from_lattices(
        j: usize,
        d: usize,
        lattices: Vec<IntervalLattice>,
        sparse_order: Option<usize>,
    ) -> Result<Decomposition> {
        let ground = VarSet::full(d).without(j);
        for l in &lattices {
            if !l.maximum().is_subset(ground) {
                return Err(Error::InvalidArgument(format!(
                    "lattice {l} is not contained in V minus node {j}"
                )));
            }
        }
        for a in 0..lattices.len() {
            for b in a + 1..lattices.len() {
                if lattices[a].intersects(&lattices[b]) {
                    return Err(Error::DecompositionInconsistency(lattices[a], lattices[b]));
                }
            }
        }
        let covered: u128 = lattices.iter().map(|l| l.cardinality()).sum();
        let complete = covered == subcube_size(VarSet::EMPTY, ground);
        Ok(Decomposition {
            j,
            lattices,
            complete,
            sparse_order,
        })
    }

    pub fn node(&self) -> usize {
        self.j
    }

    /// Lattices in discovery order.
    pub fn lattices(&self) -> &[IntervalLattice] {
        &self.lattices
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn sparse_order(&self) -> Option<usize> {
        self.sparse_order
    }

    /// Total number of subsets covered: `Σ 2^(|M|-|m|)`.
    pub fn covered_total(&self) -> u128 {
        self.lattices.iter().map(|l| l.cardinality()).sum()
    }

    /// Indices of the lattices containing `u` (at most one when the
    /// decomposition is consistent).
    pub fn covering(&self, u: VarSet) -> Vec<usize> {
        self.lattices
            .iter()
            .enumerate()
            .filter(|(_, l)| l.contains(u))
            .map(|(i, _)| i)
            .collect()
    }

    /// First overlapping pair, if any.
    pub fn find_overlap(&self) -> Option<(usize, usize)> {
        for a in 0..self.lattices.len() {
            for b in a + 1..self.lattices.len() {
                if self.lattices[a].intersects(&self.lattices[b]) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

fn push_disjoint(lattices: &mut Vec<IntervalLattice>, lat: IntervalLattice) -> Result<()> {
    for prev in lattices.iter() {
        if prev.intersects(&lat) {
            return Err(Error::DecompositionInconsistency(*prev, lat));
        }
    }
    lattices.push(lat);
    Ok(())
}

fn full_impl<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    cap: usize,
    seed_sizes: &mut Vec<usize>,
) -> Result<Decomposition> {
    oracle.ground().check_node(j)?;
    let ground = oracle.ground().all_but(j);
    if ground.len() > cap {
        return Err(Error::TooLarge(format!(
            "full decomposition over {} free nodes exceeds the cap of {cap}",
            ground.len()
        )));
    }
    let mut lattices = Vec::new();
    let mut seed = Some(ground);
    while let Some(s) = seed {
        seed_sizes.push(s.len());
        let lat = compute_lattice(oracle, j, s)?;
        push_disjoint(&mut lattices, lat)?;
        seed = find_uncovered_set(&lattices, ground)?;
    }
    Ok(Decomposition {
        j,
        lattices,
        complete: true,
        sparse_order: None,
    })
}

/// Computes the full lattice decomposition of `j`: repeatedly take the
/// lattice of `V_{-j}`, then of each uncovered set, until none remains.
pub fn full_decomposition<O: IndependenceOracle + ?Sized>(oracle: &O, j: usize) -> Result<Decomposition> {
    let mut sizes = Vec::new();
    full_impl(oracle, j, DEFAULT_DECOMPOSITION_CAP, &mut sizes)
}

pub fn full_decomposition_with_cap<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    cap: usize,
) -> Result<Decomposition> {
    let mut sizes = Vec::new();
    full_impl(oracle, j, cap, &mut sizes)
}

fn sparse_impl<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    t: usize,
    seed_sizes: &mut Vec<usize>,
) -> Result<Decomposition> {
    oracle.ground().check_node(j)?;
    let ground = oracle.ground().all_but(j);
    let mut lattices: Vec<IntervalLattice> = Vec::new();
    'candidates: for seed in ground.subsets_up_to_size(t) {
        for l in &lattices {
            if l.contains(seed) {
                continue 'candidates;
            }
        }
        seed_sizes.push(seed.len());
        let lat = compute_lattice(oracle, j, seed)?;
        push_disjoint(&mut lattices, lat)?;
    }
    let covered: u128 = lattices.iter().map(|l| l.cardinality()).sum();
    let complete = covered == subcube_size(VarSet::EMPTY, ground);
    Ok(Decomposition {
        j,
        lattices,
        complete,
        sparse_order: Some(t),
    })
}

/// Computes the sparse lattice decomposition of order `t`: seeds from
/// every subset of `V_{-j}` of size at most `t` in size-then-lex order,
/// skipping candidates already covered by a discovered lattice. The
/// result contains exactly the lattices of the full decomposition whose
/// minimum has cardinality at most `t`.
pub fn sparse_decomposition<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    t: usize,
) -> Result<Decomposition> {
    let mut sizes = Vec::new();
    sparse_impl(oracle, j, t, &mut sizes)
}

/// Query accounting for a decomposition run, compared against the
/// per-call `|V| |S|^2` and overall `d^3 k^2` budgets.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryComplexityReport {
    pub d: usize,
    pub k: usize,
    /// Oracle queries consumed by the run.
    pub queries: u64,
    /// `|V| * |seed|^2` for each lattice call, in call order.
    pub per_call_bounds: Vec<u64>,
    /// `d^3 * k^2`.
    pub overall_bound: u64,
}

impl QueryComplexityReport {
    fn new(d: usize, k: usize, queries: u64, seed_sizes: &[usize]) -> QueryComplexityReport {
        QueryComplexityReport {
            d,
            k,
            queries,
            per_call_bounds: seed_sizes.iter().map(|&s| (d * s * s) as u64).collect(),
            overall_bound: (d as u64).pow(3) * (k as u64).pow(2),
        }
    }
}

/// A decomposition together with its query accounting.
#[derive(Debug, Clone)]
pub struct DecompositionRun {
    pub decomposition: Decomposition,
    pub report: QueryComplexityReport,
}

pub fn full_decomposition_with_report<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
) -> Result<DecompositionRun> {
    let before = oracle.query_count();
    let mut sizes = Vec::new();
    let decomposition = full_impl(oracle, j, DEFAULT_DECOMPOSITION_CAP, &mut sizes)?;
    let queries = oracle.query_count() - before;
    let d = oracle.ground().size();
    let report = QueryComplexityReport::new(d, decomposition.lattices().len(), queries, &sizes);
    Ok(DecompositionRun {
        decomposition,
        report,
    })
}

pub fn sparse_decomposition_with_report<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    t: usize,
) -> Result<DecompositionRun> {
    let before = oracle.query_count();
    let mut sizes = Vec::new();
    let decomposition = sparse_impl(oracle, j, t, &mut sizes)?;
    let queries = oracle.query_count() - before;
    let d = oracle.ground().size();
    let report = QueryComplexityReport::new(d, decomposition.lattices().len(), queries, &sizes);
    Ok(DecompositionRun {
        decomposition,
        report,
    })
}
