//! Ground-truth machinery: definitional brute-force boundaries, lattices
//! and decompositions, and the graphoid axiom checker.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::interval::IntervalLattice;
use crate::lattice::Decomposition;
use crate::oracle::IndependenceOracle;
use crate::varset::VarSet;

/// Definitional Markov boundary: enumerates every `U ⊆ S`, collects the
/// relative blankets (`j ⫫ S-U | U`), and returns their intersection.
///
/// The blanket family must be exactly the interval `[m, S]`; anything
/// else means the oracle does not behave like a graphoid.
pub fn brute_boundary<O: IndependenceOracle + ?Sized>(oracle: &O, j: usize, s: VarSet) -> Result<VarSet> {
    oracle.ground().check_node(j)?;
    oracle.ground().check_set(s)?;
    if s.contains(j) {
        return Err(Error::InvalidArgument(format!("node {j} may not appear in S={s:?}")));
    }
    if s.len() > 20 {
        return Err(Error::TooLarge(format!(
            "brute boundary enumerates 2^{} blanket candidates",
            s.len()
        )));
    }
    let js = VarSet::singleton(j);
    let mut blankets = Vec::new();
    for u in s.subsets() {
        if oracle.query(js, s.difference(u), u)? {
            blankets.push(u);
        }
    }
    let m = blankets
        .iter()
        .copied()
        .fold(s, |acc, u| acc.intersection(u));
    let expected = 1u128 << (s.len() - m.len());
    if blankets.len() as u128 != expected || !blankets.iter().all(|u| m.is_subset(*u)) {
        return Err(Error::NonGraphoidBehavior(format!(
            "blanket family of j = {j} in S = {s:?} is not the interval [{m:?}, {s:?}]"
        )));
    }
    Ok(m)
}

/// Definitional neighbourhood lattice: groups every `U ⊆ V_{-j}` by
/// equality of its brute-force boundary with that of `S`, asserts the
/// class is an interval, and returns it with the explicit member list.
pub fn brute_lattice<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    s: VarSet,
) -> Result<(IntervalLattice, Vec<VarSet>)> {
    check_brute_size(oracle)?;
    let target = brute_boundary(oracle, j, s)?;
    let mut members = Vec::new();
    for u in oracle.ground().all_but(j).subsets() {
        if brute_boundary(oracle, j, u)? == target {
            members.push(u);
        }
    }
    let lattice = interval_of_class(j, &members)?;
    Ok((lattice, members))
}

/// Definitional lattice decomposition: partitions `2^(V_{-j})` by
/// brute-force boundary value, one interval per class, ordered by class
/// minimum.
pub fn brute_decomposition<O: IndependenceOracle + ?Sized>(oracle: &O, j: usize) -> Result<Decomposition> {
    check_brute_size(oracle)?;
    oracle.ground().check_node(j)?;
    let mut classes: BTreeMap<VarSet, Vec<VarSet>> = BTreeMap::new();
    for u in oracle.ground().all_but(j).subsets() {
        classes.entry(brute_boundary(oracle, j, u)?).or_default().push(u);
    }
    let lattices = classes
        .values()
        .map(|members| interval_of_class(j, members))
        .collect::<Result<Vec<_>>>()?;
    Decomposition::from_lattices(j, oracle.ground().size(), lattices, None)
}

fn check_brute_size<O: IndependenceOracle + ?Sized>(oracle: &O) -> Result<()> {
    if oracle.ground().size() > 16 {
        return Err(Error::TooLarge(format!(
            "brute-force enumeration over d = {} nodes",
            oracle.ground().size()
        )));
    }
    Ok(())
}

fn interval_of_class(j: usize, members: &[VarSet]) -> Result<IntervalLattice> {
    let inf = members
        .iter()
        .copied()
        .reduce(|a, b| a.intersection(b))
        .expect("class is nonempty");
    let sup = members
        .iter()
        .copied()
        .reduce(|a, b| a.union(b))
        .expect("class is nonempty");
    if members.len() as u128 != 1u128 << (sup.len() - inf.len()) {
        return Err(Error::NonCompositionalOracle(format!(
            "boundary class of node {j} with {} members is not the interval [{inf:?}, {sup:?}]",
            members.len()
        )));
    }
    IntervalLattice::new(inf, sup)
}

/// Status of one axiom in an [`AxiomReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomStatus {
    Holds,
    Fails,
    Skipped,
}

/// One instantiation witnessing an axiom failure.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Counterexample {
    /// Role name (`"A"`, `"B"`, ...) paired with the instantiated set.
    pub sets: Vec<(String, VarSet)>,
}

#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AxiomResult {
    pub axiom: String,
    pub status: AxiomStatus,
    pub instances_checked: u64,
    /// At most 10 witnesses per failing axiom.
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AxiomReport {
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.results.iter().all(|r| r.status != AxiomStatus::Fails)
    }

    pub fn result(&self, axiom: &str) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom.starts_with(axiom))
    }
}

const MAX_COUNTEREXAMPLES: usize = 10;
const EXHAUSTIVE_D_LIMIT: usize = 5;

struct AxiomCheck {
    name: &'static str,
    roles: &'static [&'static str],
    /// Roles that must be instantiated nonempty for the instance to be
    /// informative (an empty one reduces the axiom to triviality).
    nonempty: &'static [usize],
    /// Pair of role indices interchangeable by symmetry; instances with
    /// the pair out of canonical order are skipped.
    symmetric_pair: Option<(usize, usize)>,
    /// Roles restricted to singletons (for the weak-transitivity form).
    singleton: &'static [usize],
    check: fn(&dyn IndependenceOracle, &[VarSet]) -> Result<Option<bool>>,
}

/// Evaluates an implication; `None` means the antecedent failed and the
/// instance holds vacuously (still counted).
fn implication<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    antecedents: &[(VarSet, VarSet, VarSet)],
    consequents: &[(VarSet, VarSet, VarSet)],
    any: bool,
) -> Result<Option<bool>> {
    for &(a, b, c) in antecedents {
        if !oracle.query(a, b, c)? {
            return Ok(None);
        }
    }
    let mut ok = !any;
    for &(a, b, c) in consequents {
        let q = oracle.query(a, b, c)?;
        if any {
            ok = ok || q;
        } else {
            ok = ok && q;
        }
    }
    Ok(Some(ok))
}

fn axiom_table() -> Vec<AxiomCheck> {
    vec![
        AxiomCheck {
            name: "G1 (triviality)",
            roles: &["A", "C"],
            nonempty: &[],
            symmetric_pair: None,
            singleton: &[],
            check: |o, s| Ok(Some(o.query(s[0], VarSet::EMPTY, s[1])?)),
        },
        AxiomCheck {
            name: "G2 (symmetry)",
            roles: &["A", "B", "C"],
            nonempty: &[],
            symmetric_pair: None,
            singleton: &[],
            check: |o, s| Ok(Some(o.query(s[0], s[1], s[2])? == o.query(s[1], s[0], s[2])?)),
        },
        AxiomCheck {
            name: "G3 (decomposition)",
            roles: &["A", "B", "D", "C"],
            nonempty: &[0, 1, 2],
            symmetric_pair: Some((1, 2)),
            singleton: &[],
            check: |o, s| {
                implication(
                    o,
                    &[(s[0], s[1].union(s[2]), s[3])],
                    &[(s[0], s[1], s[3]), (s[0], s[2], s[3])],
                    false,
                )
            },
        },
        AxiomCheck {
            name: "G4 (weak union)",
            roles: &["A", "B", "D", "C"],
            nonempty: &[0, 1, 2],
            symmetric_pair: None,
            singleton: &[],
            check: |o, s| {
                implication(
                    o,
                    &[(s[0], s[1].union(s[2]), s[3])],
                    &[(s[0], s[1], s[3].union(s[2]))],
                    false,
                )
            },
        },
        AxiomCheck {
            name: "G5 (contraction)",
            roles: &["A", "B", "D", "C"],
            nonempty: &[0, 1, 2],
            symmetric_pair: None,
            singleton: &[],
            check: |o, s| {
                implication(
                    o,
                    &[(s[0], s[1], s[3]), (s[0], s[2], s[1].union(s[3]))],
                    &[(s[0], s[1].union(s[2]), s[3])],
                    false,
                )
            },
        },
        AxiomCheck {
            name: "G6 (intersection)",
            roles: &["A", "B", "C", "D"],
            nonempty: &[0, 1, 2],
            symmetric_pair: Some((1, 2)),
            singleton: &[],
            check: |o, s| {
                implication(
                    o,
                    &[
                        (s[0], s[1], s[2].union(s[3])),
                        (s[0], s[2], s[1].union(s[3])),
                    ],
                    &[(s[0], s[1].union(s[2]), s[3])],
                    false,
                )
            },
        },
        AxiomCheck {
            name: "G7 (composition)",
            roles: &["A", "B", "D", "C"],
            nonempty: &[0, 1, 2],
            symmetric_pair: Some((1, 2)),
            singleton: &[],
            check: |o, s| {
                implication(
                    o,
                    &[(s[0], s[1], s[3]), (s[0], s[2], s[3])],
                    &[(s[0], s[1].union(s[2]), s[3])],
                    false,
                )
            },
        },
        AxiomCheck {
            name: "G8 (weak transitivity)",
            roles: &["i", "j", "k", "C"],
            nonempty: &[0, 1, 2],
            symmetric_pair: Some((0, 1)),
            singleton: &[0, 1, 2],
            check: |o, s| {
                implication(
                    o,
                    &[(s[0], s[1], s[3]), (s[0], s[1], s[3].union(s[2]))],
                    &[(s[0], s[2], s[3]), (s[1], s[2], s[3])],
                    true,
                )
            },
        },
    ]
}

fn admissible(check: &AxiomCheck, sets: &[VarSet]) -> bool {
    if check.nonempty.iter().any(|&r| sets[r].is_empty()) {
        return false;
    }
    if check.singleton.iter().any(|&r| sets[r].len() != 1) {
        return false;
    }
    if let Some((x, y)) = check.symmetric_pair {
        if sets[x] > sets[y] {
            return false;
        }
    }
    true
}

fn run_axiom(
    oracle: &dyn IndependenceOracle,
    check: &AxiomCheck,
    instances: impl Iterator<Item = Vec<VarSet>>,
) -> Result<AxiomResult> {
    let mut checked = 0u64;
    let mut counterexamples = Vec::new();
    for sets in instances {
        checked += 1;
        if let Some(false) = (check.check)(oracle, &sets)? {
            if counterexamples.len() < MAX_COUNTEREXAMPLES {
                counterexamples.push(Counterexample {
                    sets: check
                        .roles
                        .iter()
                        .zip(&sets)
                        .map(|(r, s)| (r.to_string(), *s))
                        .collect(),
                });
            }
        }
    }
    Ok(AxiomResult {
        axiom: check.name.to_string(),
        status: if counterexamples.is_empty() {
            AxiomStatus::Holds
        } else {
            AxiomStatus::Fails
        },
        instances_checked: checked,
        counterexamples,
    })
}

/// Enumerates every assignment of the `d` nodes to one of `roles` slots
/// or to none, yielding the role sets.
fn all_assignments(d: usize, roles: usize) -> impl Iterator<Item = Vec<VarSet>> {
    let total = (roles as u64 + 1).pow(d as u32);
    (0..total).map(move |mut code| {
        let mut sets = vec![VarSet::EMPTY; roles];
        for node in 0..d {
            let slot = (code % (roles as u64 + 1)) as usize;
            code /= roles as u64 + 1;
            if slot > 0 {
                sets[slot - 1] = sets[slot - 1].with(node);
            }
        }
        sets
    })
}

/// Exhaustively checks the graphoid axioms G1-G7 and, when
/// `include_weak_transitivity` is set, the gaussoid axiom G8 (in its
/// elementary form). Requires `d <= 5`; larger ground sets must use
/// [`check_axioms_sampled`].
pub fn check_axioms<O: IndependenceOracle>(
    oracle: &O,
    include_weak_transitivity: bool,
) -> Result<AxiomReport> {
    let oracle: &dyn IndependenceOracle = oracle;
    let d = oracle.ground().size();
    if d > EXHAUSTIVE_D_LIMIT {
        return Err(Error::TooLarge(format!(
            "exhaustive axiom check over d = {d} > {EXHAUSTIVE_D_LIMIT}; use check_axioms_sampled"
        )));
    }
    let mut results = Vec::new();
    for check in axiom_table() {
        if check.name.starts_with("G8") && !include_weak_transitivity {
            results.push(AxiomResult {
                axiom: check.name.to_string(),
                status: AxiomStatus::Skipped,
                instances_checked: 0,
                counterexamples: Vec::new(),
            });
            continue;
        }
        let instances = all_assignments(d, check.roles.len()).filter(|sets| admissible(&check, sets));
        results.push(run_axiom(oracle, &check, instances)?);
    }
    Ok(AxiomReport { results })
}

/// Randomized axiom check for larger ground sets: per axiom, up to
/// `budget` admissible instances drawn uniformly (seeded).
pub fn check_axioms_sampled<O: IndependenceOracle>(
    oracle: &O,
    include_weak_transitivity: bool,
    budget: u64,
    seed: u64,
) -> Result<AxiomReport> {
    let oracle: &dyn IndependenceOracle = oracle;
    let d = oracle.ground().size();
    let mut results = Vec::new();
    for (index, check) in axiom_table().into_iter().enumerate() {
        if check.name.starts_with("G8") && !include_weak_transitivity {
            results.push(AxiomResult {
                axiom: check.name.to_string(),
                status: AxiomStatus::Skipped,
                instances_checked: 0,
                counterexamples: Vec::new(),
            });
            continue;
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(index as u64));
        let roles = check.roles.len();
        let instances: Vec<Vec<VarSet>> = (0..budget)
            .map(|_| {
                let mut sets = vec![VarSet::EMPTY; roles];
                for node in 0..d {
                    let slot = rng.random_range(0..=roles);
                    if slot > 0 {
                        sets[slot - 1] = sets[slot - 1].with(node);
                    }
                }
                sets
            })
            .filter(|sets| admissible(&check, sets))
            .collect();
        results.push(run_axiom(oracle, &check, instances.into_iter())?);
    }
    Ok(AxiomReport { results })
}
