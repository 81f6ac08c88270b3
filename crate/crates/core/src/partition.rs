//! Cluster assignments with dense 0-based ids.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// An assignment of each of `N` entities to exactly one of `k` clusters.
/// Ids are dense: every id in `0..k` occurs at least once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition from raw ids, re-encoding them densely to `0..k`
    /// in first-occurrence order.
    pub fn from_labels<T: Hash + Eq>(raw: &[T]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput("label list"));
        }
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for value in raw {
            let next = ids.len();
            let id = *ids.entry(value).or_insert(next);
            labels.push(id);
        }
        Ok(Self {
            labels,
            k: ids.len(),
        })
    }

    /// Wraps labels that are already dense in `0..k`.
    pub fn from_dense(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput("label list"));
        }
        let mut seen = vec![false; k];
        for &l in &labels {
            if l >= k {
                return Err(Error::InvalidParameter(format!(
                    "label {l} out of range for k = {k}"
                )));
            }
            seen[l] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidParameter(
                "labels are not dense: some id in 0..k is unused".into(),
            ));
        }
        Ok(Self { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of entities.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn label(&self, entity: usize) -> usize {
        self.labels[entity]
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Entity indices grouped by cluster id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members
    }

    /// Restricts the partition to the given entities (in order), re-encoding
    /// cluster ids densely. Used to score partitions while ignoring
    /// substituted entities.
    pub fn restricted_to(&self, keep: &[usize]) -> Result<Partition> {
        let subset: Vec<usize> = keep.iter().map(|&i| self.labels[i]).collect();
        Partition::from_labels(&subset)
    }
}
