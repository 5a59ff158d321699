//! Graph-side utilities: separation-based component decompositions,
//! closed forms for path graphs, and faithful-Gaussian generation for
//! cross-oracle testing.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::lattice::compute_mb;
use crate::oracle::{elementary_query, IndependenceOracle};
use crate::oracles::{CovarianceSpec, UndirectedGraph};
use crate::varset::VarSet;

/// The connected components of `G` with node `j` (and its incident
/// edges) removed; the components partition `V_{-j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSplit {
    pub j: usize,
    /// Components ordered by smallest member, members ascending.
    pub components: Vec<VarSet>,
}

pub fn component_split(graph: &UndirectedGraph, j: usize) -> Result<ComponentSplit> {
    graph.ground().check_node(j)?;
    let blocked = VarSet::singleton(j);
    let mut remaining = graph.ground().all_but(j);
    let mut components = Vec::new();
    while let Some(s) = remaining.min() {
        let comp = graph.reachable(VarSet::singleton(s), blocked);
        components.push(comp);
        remaining = remaining.difference(comp);
    }
    Ok(ComponentSplit { j, components })
}

/// Computes `m(j;S)` component by component: within each component
/// `G_k`, the boundary of `j` relative to `S ∩ G_k` over the subgraph
/// induced on `G_k ∪ {j}`; the results are disjoint and their union is
/// the boundary on the whole graph.
pub fn decomposed_boundary(graph: &UndirectedGraph, j: usize, s: VarSet) -> Result<VarSet> {
    graph.ground().check_set(s)?;
    if s.contains(j) {
        return Err(Error::InvalidArgument(format!("node {j} may not appear in S={s:?}")));
    }
    let split = component_split(graph, j)?;
    let mut out = VarSet::EMPTY;
    for comp in &split.components {
        let sk = s.intersection(*comp);
        if sk.is_empty() {
            continue;
        }
        let restricted = graph.induced(comp.with(j));
        let oracle = restricted.separation_oracle();
        out = out.union(compute_mb(&oracle, j, sk)?);
    }
    Ok(out)
}

/// Computes `M(j;S)` component by component: within each component the
/// restricted-lattice maximum `M(j; S ∩ G_k, G_k)`, i.e. `S_k` plus
/// every node of `G_k` independent of `j` given the restricted
/// boundary; the results are disjoint and their union is the maximum on
/// the whole graph.
pub fn decomposed_maximum(graph: &UndirectedGraph, j: usize, s: VarSet) -> Result<VarSet> {
    graph.ground().check_set(s)?;
    if s.contains(j) {
        return Err(Error::InvalidArgument(format!("node {j} may not appear in S={s:?}")));
    }
    let split = component_split(graph, j)?;
    let mut out = VarSet::EMPTY;
    for comp in &split.components {
        let sk = s.intersection(*comp);
        let restricted = graph.induced(comp.with(j));
        let oracle = restricted.separation_oracle();
        let mk = compute_mb(&oracle, j, sk)?;
        let mut max_k = sk;
        for node in comp.difference(sk).iter() {
            if elementary_query(&oracle, j, node, mk)? {
                max_k = max_k.with(node);
            }
        }
        out = out.union(max_k);
    }
    Ok(out)
}

/// Closest elements of `S` on either side of `j` in path order:
/// `(j_low, j_high) = (sup{l in S : l < j}, inf{l in S : l > j})`.
fn flanking(j: usize, s: VarSet) -> (Option<usize>, Option<usize>) {
    let below = s.iter().filter(|&l| l < j).max();
    let above = s.iter().filter(|&l| l > j).min();
    (below, above)
}

/// Closed-form Markov boundary of `j` relative to `S` on the path graph
/// `1 - 2 - ... - d` (0-indexed nodes): the nearest element of `S` on
/// each side of `j`.
pub fn path_graph_boundary(d: usize, j: usize, s: VarSet) -> Result<VarSet> {
    check_path_args(d, j, s)?;
    let (below, above) = flanking(j, s);
    Ok(VarSet::from_indices(below.into_iter().chain(above)))
}

/// Closed-form lattice maximum of `j` relative to `S` on the path graph:
/// the boundary plus everything it cuts off, i.e. every node at or
/// beyond the nearest `S`-element on each occupied side.
pub fn path_graph_maximum(d: usize, j: usize, s: VarSet) -> Result<VarSet> {
    check_path_args(d, j, s)?;
    let (below, above) = flanking(j, s);
    let mut out = VarSet::EMPTY;
    if let Some(lo) = below {
        out = out.union(VarSet::from_indices(0..=lo));
    }
    if let Some(hi) = above {
        out = out.union(VarSet::from_indices(hi..d));
    }
    Ok(out)
}

fn check_path_args(d: usize, j: usize, s: VarSet) -> Result<()> {
    if d == 0 || d > VarSet::MAX_WIDTH {
        return Err(Error::InvalidArgument(format!("bad path size {d}")));
    }
    if j >= d {
        return Err(Error::InvalidArgument(format!("node {j} out of range for path of size {d}")));
    }
    if !s.is_subset(VarSet::full(d)) || s.contains(j) {
        return Err(Error::InvalidArgument(format!(
            "S={s:?} must lie in the path and avoid j={j}"
        )));
    }
    Ok(())
}

/// Maximum conditioning-set size used when validating a generated
/// Gaussian against graph separation.
const FAITHFUL_VALIDATION_ORDER: usize = 3;
const FAITHFUL_RETRIES: u64 = 50;

/// Builds a Gaussian faithful to `G`: a precision matrix with edge
/// weights drawn uniformly from `±[0.1, 0.3]` (seeded), zeros off the
/// edges, and diagonal `1 + row absolute sum`, so the matrix is
/// diagonally dominant and positive definite.
///
/// Faithfulness of such a draw is generic rather than certified, so the
/// generator cross-checks the exact Gaussian oracle against the
/// separation oracle on every elementary triple with `|C| <= min(d-2,
/// 3)` and redraws (up to 50 times, offsetting the seed) on any
/// mismatch.
pub fn faithful_gaussian(graph: &UndirectedGraph, seed: u64) -> Result<CovarianceSpec> {
    let d = graph.ground().size();
    for attempt in 0..FAITHFUL_RETRIES {
        let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut k = DMatrix::<f64>::zeros(d, d);
        for &(u, v) in graph.edges() {
            let mag = rng.random_range(0.1..=0.3);
            let w = if rng.random_bool(0.5) { mag } else { -mag };
            k[(u, v)] = w;
            k[(v, u)] = w;
        }
        for i in 0..d {
            let row_abs: f64 = (0..d).filter(|&j| j != i).map(|j| k[(i, j)].abs()).sum();
            k[(i, i)] = 1.0 + row_abs;
        }
        let spec = CovarianceSpec::from_precision(k)?;
        if matches_separation(&spec, graph)? {
            return Ok(spec);
        }
    }
    Err(Error::GenerationFailure(format!(
        "no faithful Gaussian for the graph after {FAITHFUL_RETRIES} draws from seed {seed}"
    )))
}

fn matches_separation(spec: &CovarianceSpec, graph: &UndirectedGraph) -> Result<bool> {
    let d = graph.ground().size();
    let exact = spec.exact_oracle();
    let sep = graph.separation_oracle();
    let order = FAITHFUL_VALIDATION_ORDER.min(d.saturating_sub(2));
    for i in 0..d {
        for j in i + 1..d {
            let rest = graph.ground().all().without(i).without(j);
            for c in rest.subsets_up_to_size(order) {
                let a = VarSet::singleton(i);
                let b = VarSet::singleton(j);
                if exact.query(a, b, c)? != sep.query(a, b, c)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
