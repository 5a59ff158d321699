use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::triple::check_disjoint;
use crate::varset::VarSet;

/// The queryable interface "is A independent of B given C?".
///
/// Implementations must be deterministic per instance and safe to query
/// concurrently; the query counter is an atomic tally.
pub trait IndependenceOracle: Send + Sync {
    fn ground(&self) -> &GroundSet;

    /// Answers `A ⫫ B | C`. Implementations must validate pairwise
    /// disjointness and range, and count exactly one graphoid query per
    /// answered call.
    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool>;

    /// Number of graphoid queries answered so far.
    fn query_count(&self) -> u64;
}

impl<T: IndependenceOracle + ?Sized> IndependenceOracle for &T {
    fn ground(&self) -> &GroundSet {
        (**self).ground()
    }
    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        (**self).query(a, b, c)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

impl<T: IndependenceOracle + ?Sized> IndependenceOracle for std::sync::Arc<T> {
    fn ground(&self) -> &GroundSet {
        (**self).ground()
    }
    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        (**self).query(a, b, c)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

impl<T: IndependenceOracle + ?Sized> IndependenceOracle for Box<T> {
    fn ground(&self) -> &GroundSet {
        (**self).ground()
    }
    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        (**self).query(a, b, c)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// Shared argument validation for oracle backends. Returns `Ok(true)`
/// early for triviality (`A` or `B` empty), which every graphoid must
/// satisfy, so backends only see nonempty sides.
pub(crate) fn validate_query(ground: &GroundSet, a: VarSet, b: VarSet, c: VarSet) -> Result<Option<bool>> {
    ground.check_set(a)?;
    ground.check_set(b)?;
    ground.check_set(c)?;
    check_disjoint(a, b, c)?;
    if a.is_empty() || b.is_empty() {
        return Ok(Some(true));
    }
    Ok(None)
}

/// Atomic query tally shared by the oracle backends.
#[derive(Debug, Default)]
pub(crate) struct QueryCounter(AtomicU64);

impl QueryCounter {
    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// `j ⫫ i | C` for single nodes: the elementary query.
pub fn elementary_query<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    j: usize,
    i: usize,
    c: VarSet,
) -> Result<bool> {
    if j == i || c.contains(j) || c.contains(i) {
        return Err(Error::InvalidArgument(format!(
            "elementary query nodes must be distinct from each other and from C: j={j} i={i} C={c:?}"
        )));
    }
    oracle.query(VarSet::singleton(j), VarSet::singleton(i), c)
}

/// Memoizing wrapper: identical semantics, but a repeated triple (up to
/// the symmetry axiom, i.e. keyed on the unordered pair `{A, B}` plus
/// `C`) is answered from the cache and does not reach the inner oracle.
///
/// `query_count` reports raw calls; `effective_count` reports cache
/// misses, which equals the inner oracle's own tally growth.
pub struct CachingOracle<O: IndependenceOracle> {
    inner: O,
    cache: Mutex<HashMap<(VarSet, VarSet, VarSet), bool>>,
    raw: QueryCounter,
    misses: QueryCounter,
}

impl<O: IndependenceOracle> CachingOracle<O> {
    pub fn new(inner: O) -> Self {
        CachingOracle {
            inner,
            cache: Mutex::new(HashMap::new()),
            raw: QueryCounter::default(),
            misses: QueryCounter::default(),
        }
    }

    /// Sorting the `{A, B}` pair exploits symmetry (G2) to halve the
    /// cache.
    fn key(a: VarSet, b: VarSet, c: VarSet) -> (VarSet, VarSet, VarSet) {
        if a <= b {
            (a, b, c)
        } else {
            (b, a, c)
        }
    }

    pub fn effective_count(&self) -> u64 {
        self.misses.get()
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: IndependenceOracle> IndependenceOracle for CachingOracle<O> {
    fn ground(&self) -> &GroundSet {
        self.inner.ground()
    }

    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        if let Some(t) = validate_query(self.inner.ground(), a, b, c)? {
            self.raw.bump();
            return Ok(t);
        }
        self.raw.bump();
        let key = Self::key(a, b, c);
        if let Some(&ans) = self.cache.lock().unwrap().get(&key) {
            return Ok(ans);
        }
        let ans = self.inner.query(a, b, c)?;
        self.misses.bump();
        self.cache.lock().unwrap().insert(key, ans);
        Ok(ans)
    }

    fn query_count(&self) -> u64 {
        self.raw.get()
    }
}
