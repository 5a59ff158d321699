use std::fmt;

use crate::error::{Error, Result};

/// A subset of a ground set of at most 64 nodes, stored as a fixed-width
/// bitset.
///
/// All algorithms in this crate are dominated by set operations, so the
/// representation is a single machine word and every operation below is
/// O(1). Ground sets larger than 64 nodes would need a growable backing
/// store (e.g. a small vector of words) behind the same interface;
/// [`crate::GroundSet`] rejects `d > 64` so that this type never has to
/// guess its width.
///
/// Node indices are 0-based internally. Values are immutable: operations
/// return new sets.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarSet {
    bits: u64,
}

impl VarSet {
    pub const MAX_WIDTH: usize = 64;

    /// The empty set.
    pub const EMPTY: VarSet = VarSet { bits: 0 };

    /// The set `{node}`.
    pub fn singleton(node: usize) -> VarSet {
        debug_assert!(node < Self::MAX_WIDTH);
        VarSet { bits: 1u64 << node }
    }

    /// The full set `{0, .., d-1}`.
    pub fn full(d: usize) -> VarSet {
        debug_assert!(d <= Self::MAX_WIDTH);
        if d == Self::MAX_WIDTH {
            VarSet { bits: u64::MAX }
        } else {
            VarSet {
                bits: (1u64 << d) - 1,
            }
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(iter: I) -> VarSet {
        let mut s = VarSet::EMPTY;
        for i in iter {
            s = s.with(i);
        }
        s
    }

    /// Validates that every member lies in `[0, d)`.
    pub fn checked_from_indices<I: IntoIterator<Item = usize>>(iter: I, d: usize) -> Result<VarSet> {
        let mut s = VarSet::EMPTY;
        for i in iter {
            if i >= d {
                return Err(Error::InvalidArgument(format!(
                    "node index {i} out of range for ground set of size {d}"
                )));
            }
            s = s.with(i);
        }
        Ok(s)
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(self, node: usize) -> bool {
        node < Self::MAX_WIDTH && self.bits & (1u64 << node) != 0
    }

    pub fn with(self, node: usize) -> VarSet {
        debug_assert!(node < Self::MAX_WIDTH);
        VarSet {
            bits: self.bits | (1u64 << node),
        }
    }

    pub fn without(self, node: usize) -> VarSet {
        debug_assert!(node < Self::MAX_WIDTH);
        VarSet {
            bits: self.bits & !(1u64 << node),
        }
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet {
            bits: self.bits | other.bits,
        }
    }

    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet {
            bits: self.bits & other.bits,
        }
    }

    pub fn difference(self, other: VarSet) -> VarSet {
        VarSet {
            bits: self.bits & !other.bits,
        }
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.bits & other.bits == 0
    }

    /// The smallest member, if any.
    pub fn min(self) -> Option<usize> {
        if self.bits == 0 {
            None
        } else {
            Some(self.bits.trailing_zeros() as usize)
        }
    }

    /// Members in ascending index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, in ascending submask order (the empty set
    /// first, `self` last).
    pub fn subsets(self) -> impl Iterator<Item = VarSet> {
        let full = self.bits;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(VarSet { bits: cur })
        })
    }

    /// All subsets of `self` with exactly `k` members, in lexicographic
    /// order of their ascending member lists.
    pub fn subsets_of_size(self, k: usize) -> Vec<VarSet> {
        let members = self.to_vec();
        let mut out = Vec::new();
        if k > members.len() {
            return out;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(VarSet::from_indices(idx.iter().map(|&p| members[p])));
            if k == 0 {
                break;
            }
            // advance the combination
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if idx[i] != i + members.len() - k {
                    break;
                }
                if i == 0 {
                    return out;
                }
            }
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
        out
    }

    /// All subsets of `self` of size at most `s`, in size-then-lexicographic
    /// order.
    pub fn subsets_up_to_size(self, s: usize) -> Vec<VarSet> {
        let mut out = Vec::new();
        for k in 0..=s.min(self.len()) {
            out.extend(self.subsets_of_size(k));
        }
        out
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VarSet::from_indices(iter)
    }
}

impl serde::Serialize for VarSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> serde::Deserialize<'de> for VarSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        for &i in &v {
            if i >= VarSet::MAX_WIDTH {
                return Err(serde::de::Error::custom(format!("node index {i} out of range")));
            }
        }
        Ok(VarSet::from_indices(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn model(s: VarSet) -> BTreeSet<usize> {
        s.iter().collect()
    }

    #[test]
    fn basic_ops() {
        let a = VarSet::from_indices([0, 2, 5]);
        let b = VarSet::from_indices([2, 3]);
        assert_eq!(a.len(), 3);
        assert!(a.contains(5));
        assert!(!a.contains(1));
        assert_eq!(a.union(b).to_vec(), vec![0, 2, 3, 5]);
        assert_eq!(a.intersection(b).to_vec(), vec![2]);
        assert_eq!(a.difference(b).to_vec(), vec![0, 5]);
        assert!(VarSet::from_indices([2]).is_subset(b));
        assert!(!b.is_subset(a));
        assert_eq!(VarSet::full(3).to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn checked_construction_rejects_out_of_range() {
        assert!(VarSet::checked_from_indices([0, 4], 4).is_err());
        assert!(VarSet::checked_from_indices([0, 3], 4).is_ok());
    }

    #[test]
    fn subsets_enumeration() {
        let s = VarSet::from_indices([1, 3]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 4);
        assert_eq!(subs[0], VarSet::EMPTY);
        assert_eq!(subs[3], s);
    }

    #[test]
    fn subsets_by_size_order() {
        let s = VarSet::from_indices([0, 1, 2]);
        let subs = s.subsets_up_to_size(2);
        let expect: Vec<Vec<usize>> = vec![
            vec![],
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
        ];
        assert_eq!(subs.iter().map(|v| v.to_vec()).collect::<Vec<_>>(), expect);
    }

    proptest! {
        #[test]
        fn ops_agree_with_btreeset(a in proptest::collection::btree_set(0usize..16, 0..10),
                                   b in proptest::collection::btree_set(0usize..16, 0..10)) {
            let va = VarSet::from_indices(a.iter().copied());
            let vb = VarSet::from_indices(b.iter().copied());
            prop_assert_eq!(model(va.union(vb)), a.union(&b).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(model(va.intersection(vb)), a.intersection(&b).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(model(va.difference(vb)), a.difference(&b).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(va.is_subset(vb), a.is_subset(&b));
            prop_assert_eq!(va.len(), a.len());
            prop_assert_eq!(va.to_vec(), a.iter().copied().collect::<Vec<_>>());
        }
    }
}
