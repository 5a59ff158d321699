use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::varset::VarSet;

/// The finite ground set of nodes, with optional human-readable labels.
///
/// Nodes are 0-indexed internally; labels (defaulting to `"1".."d"`) are
/// the I/O currency so that printed sets match the usual 1-indexed
/// convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    d: usize,
    labels: Arc<Vec<String>>,
    by_label: Arc<HashMap<String, usize>>,
}

impl GroundSet {
    /// A ground set of size `d` with default labels `"1".."d"`.
    pub fn new(d: usize) -> Result<GroundSet> {
        let labels: Vec<String> = (1..=d).map(|i| i.to_string()).collect();
        GroundSet::with_labels(labels)
    }

    /// A ground set with explicit labels; the size is the label count.
    pub fn with_labels(labels: Vec<String>) -> Result<GroundSet> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::InvalidArgument("ground set must be nonempty".into()));
        }
        if d > VarSet::MAX_WIDTH {
            return Err(Error::TooLarge(format!(
                "ground set of size {d} exceeds the {} node bitset width",
                VarSet::MAX_WIDTH
            )));
        }
        let mut by_label = HashMap::with_capacity(d);
        for (i, l) in labels.iter().enumerate() {
            if by_label.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate label {l:?}")));
            }
        }
        Ok(GroundSet {
            d,
            labels: Arc::new(labels),
            by_label: Arc::new(by_label),
        })
    }

    pub fn size(&self) -> usize {
        self.d
    }

    /// The full set `V`.
    pub fn all(&self) -> VarSet {
        VarSet::full(self.d)
    }

    /// `V_{-j}`: every node except `j`.
    pub fn all_but(&self, j: usize) -> VarSet {
        self.all().without(j)
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Result<usize> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown label {label:?}")))
    }

    pub fn set_to_labels(&self, set: VarSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].clone()).collect()
    }

    pub fn set_from_labels<'a, I: IntoIterator<Item = &'a str>>(&self, labels: I) -> Result<VarSet> {
        let mut s = VarSet::EMPTY;
        for l in labels {
            s = s.with(self.node_by_label(l)?);
        }
        Ok(s)
    }

    pub fn check_node(&self, j: usize) -> Result<()> {
        if j >= self.d {
            return Err(Error::InvalidArgument(format!(
                "node {j} out of range for ground set of size {}",
                self.d
            )));
        }
        Ok(())
    }

    pub fn check_set(&self, s: VarSet) -> Result<()> {
        if !s.is_subset(self.all()) {
            return Err(Error::InvalidArgument(format!(
                "set {s:?} not contained in ground set of size {}",
                self.d
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_labels_are_one_indexed() {
        let g = GroundSet::new(3).unwrap();
        assert_eq!(g.labels(), &["1", "2", "3"]);
        assert_eq!(g.node_by_label("2").unwrap(), 1);
        assert_eq!(g.set_to_labels(VarSet::from_indices([0, 2])), vec!["1", "3"]);
    }

    #[test]
    fn rejects_bad_ground_sets() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::with_labels(vec!["a".into(), "a".into()]).is_err());
        assert!(GroundSet::new(65).is_err());
        assert!(GroundSet::new(64).is_ok());
    }
}
