//! Merge trees produced by the agglomerative algorithms.

use crate::error::{Error, Result};
use crate::partition::Partition;

/// One agglomeration step: clusters `left` and `right` are merged into a new
/// cluster of `size` members at the given cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub cost: f64,
    pub size: usize,
}

/// An ordered list of merges over `n_leaves` initial clusters. Leaves carry
/// ids `0..n_leaves`; the cluster created by merge `i` carries id
/// `n_leaves + i` (the usual linkage-matrix convention).
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n_leaves: usize,
    leaf_sizes: Vec<usize>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// A dendrogram over singleton leaves with no merges yet.
    pub fn new(n_leaves: usize) -> Result<Self> {
        Self::with_leaf_sizes(vec![1; n_leaves])
    }

    /// A dendrogram whose leaves are clusters of the given sizes (the
    /// anomalous-pattern variants start from non-singleton leaves).
    pub fn with_leaf_sizes(leaf_sizes: Vec<usize>) -> Result<Self> {
        if leaf_sizes.is_empty() {
            return Err(Error::EmptyInput("dendrogram needs at least one leaf"));
        }
        if leaf_sizes.contains(&0) {
            return Err(Error::InvalidParameter("leaf of size zero".into()));
        }
        Ok(Self {
            n_leaves: leaf_sizes.len(),
            leaf_sizes,
            merges: Vec::new(),
        })
    }

    /// Validates and assembles a dendrogram from pre-recorded merges
    /// (used when reloading a linkage matrix).
    pub fn from_merges(n_leaves: usize, merges: Vec<Merge>) -> Result<Self> {
        let mut d = Dendrogram::new(n_leaves)?;
        for m in merges {
            d.record(m.left, m.right, m.cost)?;
        }
        Ok(d)
    }

    /// Appends a merge of two live cluster ids, returning the new cluster id.
    pub fn record(&mut self, a: usize, b: usize, cost: f64) -> Result<usize> {
        if a == b {
            return Err(Error::InvalidParameter(format!(
                "cannot merge cluster {a} with itself"
            )));
        }
        if !cost.is_finite() || cost < 0.0 {
            return Err(Error::InvalidParameter(format!("merge cost {cost}")));
        }
        let (left, right) = if a < b { (a, b) } else { (b, a) };
        let next_id = self.n_leaves + self.merges.len();
        if right >= next_id {
            return Err(Error::InvalidParameter(format!(
                "merge references unknown cluster id {right}"
            )));
        }
        if self.is_consumed(left) || self.is_consumed(right) {
            return Err(Error::InvalidParameter(format!(
                "merge ({left}, {right}) references a cluster that was already merged"
            )));
        }
        let size = self.cluster_size(left) + self.cluster_size(right);
        self.merges.push(Merge {
            left,
            right,
            cost,
            size,
        });
        Ok(next_id)
    }

    fn is_consumed(&self, id: usize) -> bool {
        self.merges.iter().any(|m| m.left == id || m.right == id)
    }

    fn cluster_size(&self, id: usize) -> usize {
        if id < self.n_leaves {
            self.leaf_sizes[id]
        } else {
            self.merges[id - self.n_leaves].size
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn leaf_sizes(&self) -> &[usize] {
        &self.leaf_sizes
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Live cluster count after all recorded merges.
    pub fn n_clusters(&self) -> usize {
        self.n_leaves - self.merges.len()
    }

    /// Indices of merges whose cost is lower than an earlier merge's cost.
    /// The weighted criteria may legitimately produce such inversions, so
    /// exports flag them instead of failing.
    pub fn cost_inversions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut max_so_far = f64::NEG_INFINITY;
        for (i, m) in self.merges.iter().enumerate() {
            if m.cost < max_so_far {
                out.push(i);
            }
            if m.cost > max_so_far {
                max_so_far = m.cost;
            }
        }
        out
    }

    /// Replays merges until exactly `k_target` live clusters remain and
    /// returns the induced partition over the original leaves, with cluster
    /// ids densified in first-occurrence order.
    pub fn cut(&self, k_target: usize) -> Result<Partition> {
        if k_target < 1 || k_target > self.n_leaves {
            return Err(Error::KTargetOutOfRange {
                k: k_target,
                max: self.n_leaves,
            });
        }
        let n_merges = self.n_leaves - k_target;
        if n_merges > self.merges.len() {
            return Err(Error::KTargetOutOfRange {
                k: k_target,
                max: self.n_leaves,
            });
        }
        // Union-find over leaf and merge ids.
        let mut parent: Vec<usize> = (0..self.n_leaves + n_merges).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, m) in self.merges.iter().take(n_merges).enumerate() {
            let new_id = self.n_leaves + i;
            let ra = find(&mut parent, m.left);
            let rb = find(&mut parent, m.right);
            parent[ra] = new_id;
            parent[rb] = new_id;
        }
        let roots: Vec<usize> = (0..self.n_leaves)
            .map(|leaf| find(&mut parent, leaf))
            .collect();
        Partition::from_labels(&roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_leaf() -> Dendrogram {
        let mut d = Dendrogram::new(4).unwrap();
        d.record(0, 1, 0.5).unwrap();
        d.record(2, 3, 0.7).unwrap();
        d.record(4, 5, 2.0).unwrap();
        d
    }

    #[test]
    fn ids_follow_linkage_convention() {
        let d = four_leaf();
        assert_eq!(d.merges()[0].size, 2);
        assert_eq!(d.merges()[2].left, 4);
        assert_eq!(d.merges()[2].right, 5);
        assert_eq!(d.merges()[2].size, 4);
        assert_eq!(d.n_clusters(), 1);
    }

    #[test]
    fn cut_at_n_leaves_is_identity() {
        let d = four_leaf();
        let p = d.cut(4).unwrap();
        assert_eq!(p.labels(), &[0, 1, 2, 3]);
    }

    #[test]
    fn cut_at_one_is_single_cluster() {
        let d = four_leaf();
        let p = d.cut(1).unwrap();
        assert_eq!(p.labels(), &[0, 0, 0, 0]);
    }

    // Replay oracle by hand: 4 leaves, merges (0,1) then (2,3); at k=2 the
    // live clusters are {0,1} and {2,3}.
    #[test]
    fn cut_matches_hand_replay() {
        let d = four_leaf();
        let p = d.cut(2).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 1]);
        assert_eq!(p.k(), 2);
    }

    #[test]
    fn cut_out_of_range_errors() {
        let d = four_leaf();
        assert!(d.cut(0).is_err());
        assert!(d.cut(5).is_err());
    }

    #[test]
    fn refinement_between_levels() {
        let d = four_leaf();
        for k in (2..=4).rev() {
            let fine = d.cut(k).unwrap();
            let coarse = d.cut(k - 1).unwrap();
            // every fine cluster maps into exactly one coarse cluster
            let mut map: Vec<Option<usize>> = vec![None; fine.k()];
            for i in 0..fine.len() {
                let f = fine.label(i);
                let c = coarse.label(i);
                match map[f] {
                    None => map[f] = Some(c),
                    Some(prev) => assert_eq!(prev, c, "cluster {f} split at level {}", k - 1),
                }
            }
        }
    }

    #[test]
    fn record_rejects_dead_ids() {
        let mut d = Dendrogram::new(3).unwrap();
        d.record(0, 1, 1.0).unwrap();
        assert!(d.record(0, 2, 1.0).is_err());
        assert!(d.record(3, 3, 1.0).is_err());
        assert!(d.record(2, 9, 1.0).is_err());
    }

    #[test]
    fn inversions_are_detected() {
        let mut d = Dendrogram::new(3).unwrap();
        d.record(0, 1, 2.0).unwrap();
        d.record(2, 3, 1.0).unwrap();
        assert_eq!(d.cost_inversions(), vec![1]);
    }
}
