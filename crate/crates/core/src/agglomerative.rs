//! The merge engines: plain Ward via Lance–Williams updates, the
//! anomalous-pattern-initialised A-Ward, and the weighted variants that
//! re-derive centroids and feature weights after every merge.

use std::time::{Duration, Instant};

use crate::dendrogram::Dendrogram;
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::minkowski::{center_of_members, pow_abs, weights_from_dispersion_row};
use crate::partition::Partition;
use crate::partitional::{anomalous_init_pb, ik_means, imwk_means_pb, AnomalousInit};
use crate::state::ClusterState;

/// The within-variance increase caused by merging two clusters:
/// `(na*nb/(na+nb)) * sum_v (ca_v - cb_v)^2`. If two pairs are equally far
/// apart, the factor makes the lower-cardinality pair cheaper.
pub fn ward_cost(na: usize, ca: &[f64], nb: usize, cb: &[f64]) -> f64 {
    let factor = (na * nb) as f64 / (na + nb) as f64;
    let mut gap = 0.0;
    for (&a, &b) in ca.iter().zip(cb) {
        let d = a - b;
        gap += d * d;
    }
    factor * gap
}

/// Weighted two-exponent merge cost:
/// `(na*nb/(na+nb)) * sum_v ((wa_v+wb_v)/2)^beta |ca_v - cb_v|^p`.
pub fn ward_pb_cost(
    na: usize,
    ca: &[f64],
    wa: &[f64],
    nb: usize,
    cb: &[f64],
    wb: &[f64],
    p: f64,
    beta: f64,
) -> f64 {
    let factor = (na * nb) as f64 / (na + nb) as f64;
    let mut acc = 0.0;
    for v in 0..ca.len() {
        let w = 0.5 * (wa[v] + wb[v]);
        acc += w.powf(beta) * pow_abs(ca[v] - cb[v], p);
    }
    factor * acc
}

/// Single-exponent weighted merge cost (the weight exponent equals the
/// distance exponent).
pub fn ward_p_cost(
    na: usize,
    ca: &[f64],
    wa: &[f64],
    nb: usize,
    cb: &[f64],
    wb: &[f64],
    p: f64,
) -> f64 {
    ward_pb_cost(na, ca, wa, nb, cb, wb, p, p)
}

#[inline]
fn pair_ids(ids: &[usize], i: usize, j: usize) -> (usize, usize) {
    let (a, b) = (ids[i], ids[j]);
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Strict candidate ordering: lower cost wins; equal costs fall back to the
/// lexicographically smallest cluster-id pair, so dendrograms are
/// reproducible.
#[inline]
fn improves(cost: f64, ids: (usize, usize), best_cost: f64, best_ids: (usize, usize)) -> bool {
    cost < best_cost || (cost == best_cost && ids < best_ids)
}

/// Ward agglomeration over pre-formed leaves with given centroids and sizes,
/// merging down to `k_target` live clusters. Costs are maintained with the
/// Lance–Williams recurrence, which reproduces the centroid-form cost
/// exactly for sized leaves.
pub fn ward_from_leaves(
    centroids: &[Vec<f64>],
    sizes: &[usize],
    k_target: usize,
) -> Result<Dendrogram> {
    let k0 = centroids.len();
    if k0 == 0 {
        return Err(Error::EmptyInput("leaves"));
    }
    if sizes.len() != k0 {
        return Err(Error::DimensionMismatch(format!(
            "{} sizes for {} leaves",
            sizes.len(),
            k0
        )));
    }
    if k_target < 1 || k_target > k0 {
        return Err(Error::KTargetOutOfRange {
            k: k_target,
            max: k0,
        });
    }
    let v = centroids[0].len();
    if centroids.iter().any(|c| c.len() != v) {
        return Err(Error::DimensionMismatch("centroid width".into()));
    }

    let mut dendrogram = Dendrogram::with_leaf_sizes(sizes.to_vec())?;
    if k_target == k0 {
        return Ok(dendrogram);
    }

    let mut cost = vec![0.0f64; k0 * k0];
    for i in 0..k0 {
        for j in (i + 1)..k0 {
            let c = ward_cost(sizes[i], &centroids[i], sizes[j], &centroids[j]);
            cost[i * k0 + j] = c;
            cost[j * k0 + i] = c;
        }
    }

    let mut active = vec![true; k0];
    let mut size = sizes.to_vec();
    let mut ids: Vec<usize> = (0..k0).collect();

    // Cached nearest neighbour per live slot. Only entries involving a merged
    // slot can change, so the cache stays valid between repairs.
    let scan_nn = |slot: usize, active: &[bool], cost: &[f64], ids: &[usize]| -> (f64, usize) {
        let mut best_cost = f64::INFINITY;
        let mut best_slot = usize::MAX;
        let mut best_ids = (usize::MAX, usize::MAX);
        for j in 0..k0 {
            if j == slot || !active[j] {
                continue;
            }
            let c = cost[slot * k0 + j];
            let key = pair_ids(ids, slot, j);
            if improves(c, key, best_cost, best_ids) {
                best_cost = c;
                best_slot = j;
                best_ids = key;
            }
        }
        (best_cost, best_slot)
    };

    let mut nn: Vec<(f64, usize)> = (0..k0).map(|i| scan_nn(i, &active, &cost, &ids)).collect();

    let mut live = k0;
    while live > k_target {
        // Globally best candidate among the cached per-slot minima.
        let mut best_slot = usize::MAX;
        let mut best_cost = f64::INFINITY;
        let mut best_ids = (usize::MAX, usize::MAX);
        for i in 0..k0 {
            if !active[i] {
                continue;
            }
            let (c, j) = nn[i];
            let key = pair_ids(&ids, i, j);
            if improves(c, key, best_cost, best_ids) {
                best_cost = c;
                best_slot = i;
                best_ids = key;
            }
        }
        let keep = best_slot;
        let dead = nn[keep].1;

        let na = size[keep];
        let nb = size[dead];
        let cost_ab = cost[keep * k0 + dead];
        let new_id = dendrogram.record(ids[keep], ids[dead], best_cost)?;

        active[dead] = false;
        size[keep] = na + nb;
        ids[keep] = new_id;
        live -= 1;

        for x in 0..k0 {
            if !active[x] || x == keep {
                continue;
            }
            let nx = size[x];
            let updated = ((na + nx) as f64 * cost[x * k0 + keep]
                + (nb + nx) as f64 * cost[x * k0 + dead]
                - nx as f64 * cost_ab)
                / (na + nb + nx) as f64;
            // cancellation on near-coincident clusters can dip a hair below zero
            let updated = updated.max(0.0);
            cost[x * k0 + keep] = updated;
            cost[keep * k0 + x] = updated;
        }

        for x in 0..k0 {
            if !active[x] || x == keep {
                continue;
            }
            if nn[x].1 == keep || nn[x].1 == dead {
                nn[x] = scan_nn(x, &active, &cost, &ids);
            } else {
                let c = cost[x * k0 + keep];
                let key = pair_ids(&ids, x, keep);
                let cur_key = pair_ids(&ids, x, nn[x].1);
                if improves(c, key, nn[x].0, cur_key) {
                    nn[x] = (c, keep);
                }
            }
        }
        if live > 1 {
            nn[keep] = scan_nn(keep, &active, &cost, &ids);
        }
    }
    Ok(dendrogram)
}

/// Classical Ward from singletons: every entity starts as its own leaf.
pub fn ward(m: &DataMatrix, k_target: usize) -> Result<Dendrogram> {
    let centroids: Vec<Vec<f64>> = m.rows().map(|r| r.to_vec()).collect();
    let sizes = vec![1usize; m.n_entities()];
    ward_from_leaves(&centroids, &sizes, k_target)
}

/// Ward started from the anomalous-pattern partition instead of singletons.
#[derive(Debug, Clone)]
pub struct AWardResult {
    pub dendrogram: Dendrogram,
    /// Entity-to-leaf membership produced by the initialisation.
    pub leaf_partition: Partition,
    pub leaf_centroids: Vec<Vec<f64>>,
    pub init: AnomalousInit,
    pub init_time: Duration,
    pub merge_time: Duration,
}

impl AWardResult {
    pub fn k_star(&self) -> usize {
        self.init.k_star
    }

    /// Partition of the original entities at `k` clusters: cut the merge tree
    /// over the leaves, then push labels down through the leaf membership.
    pub fn entity_partition(&self, k: usize) -> Result<Partition> {
        compose_cut(&self.dendrogram, &self.leaf_partition, k)
    }
}

fn compose_cut(d: &Dendrogram, leaf_partition: &Partition, k: usize) -> Result<Partition> {
    let cut = d.cut(k)?;
    let labels: Vec<usize> = leaf_partition
        .labels()
        .iter()
        .map(|&leaf| cut.label(leaf))
        .collect();
    Partition::from_labels(&labels)
}

/// A-Ward: run the anomalous-cluster identification with the given minimum
/// cluster size (1 in the standard setting), treat its clusters as leaves,
/// and merge them by Ward cost down to `k_target`.
pub fn a_ward(m: &DataMatrix, k_target: usize, theta: usize) -> Result<AWardResult> {
    let started = Instant::now();
    let ik = ik_means(m, theta)?;
    let init_time = started.elapsed();

    let leaf_sizes = ik.partition.cluster_sizes();
    let n_leaves = leaf_sizes.len();
    if k_target > n_leaves {
        return Err(Error::KTargetExceedsInit {
            k: k_target,
            k_star: n_leaves,
        });
    }
    let merging = Instant::now();
    let dendrogram = ward_from_leaves(&ik.centroids, &leaf_sizes, k_target)?;
    let merge_time = merging.elapsed();

    Ok(AWardResult {
        dendrogram,
        leaf_partition: ik.partition,
        leaf_centroids: ik.centroids,
        init: ik.init,
        init_time,
        merge_time,
    })
}

/// Optional per-leaf "mini-trees": a full Ward dendrogram inside each initial
/// cluster, so the hierarchy below the anomalous-pattern leaves can be
/// reconstructed. Returns, per leaf, the member entity ids (in mini-tree leaf
/// order) and the tree.
pub fn a_ward_mini_trees(
    m: &DataMatrix,
    result: &AWardResult,
) -> Result<Vec<(Vec<usize>, Dendrogram)>> {
    let mut out = Vec::new();
    for members in result.leaf_partition.members() {
        let centroids: Vec<Vec<f64>> = members.iter().map(|&i| m.row(i).to_vec()).collect();
        let sizes = vec![1usize; members.len()];
        let tree = ward_from_leaves(&centroids, &sizes, 1)?;
        out.push((members, tree));
    }
    Ok(out)
}

struct WeightedCluster {
    members: Vec<usize>,
    centroid: Vec<f64>,
    weights: Vec<f64>,
}

/// Agglomeration under the weighted two-exponent cost. After each merge the
/// merged cluster's centroid is re-derived as the Minkowski center of its
/// members and the weight update is re-applied; untouched clusters keep
/// their dispersions, so their weights come out unchanged and their cached
/// pairwise costs stay valid.
fn weighted_agglomerate(
    m: &DataMatrix,
    mut clusters: Vec<WeightedCluster>,
    p: f64,
    beta: f64,
    k_target: usize,
) -> Result<Dendrogram> {
    let k0 = clusters.len();
    let leaf_sizes: Vec<usize> = clusters.iter().map(|c| c.members.len()).collect();
    if k_target < 1 || k_target > k0 {
        return Err(Error::KTargetOutOfRange {
            k: k_target,
            max: k0,
        });
    }
    let mut dendrogram = Dendrogram::with_leaf_sizes(leaf_sizes)?;
    if k_target == k0 {
        return Ok(dendrogram);
    }

    let pair_cost = |a: &WeightedCluster, b: &WeightedCluster| -> f64 {
        ward_pb_cost(
            a.members.len(),
            &a.centroid,
            &a.weights,
            b.members.len(),
            &b.centroid,
            &b.weights,
            p,
            beta,
        )
    };

    let mut cost = vec![0.0f64; k0 * k0];
    for i in 0..k0 {
        for j in (i + 1)..k0 {
            let c = pair_cost(&clusters[i], &clusters[j]);
            cost[i * k0 + j] = c;
            cost[j * k0 + i] = c;
        }
    }
    let mut active = vec![true; k0];
    let mut ids: Vec<usize> = (0..k0).collect();
    let mut column = Vec::with_capacity(m.n_entities());

    let mut live = k0;
    while live > k_target {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_cost = f64::INFINITY;
        let mut best_ids = (usize::MAX, usize::MAX);
        for i in 0..k0 {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..k0 {
                if !active[j] {
                    continue;
                }
                let c = cost[i * k0 + j];
                let key = pair_ids(&ids, i, j);
                if improves(c, key, best_cost, best_ids) {
                    best_cost = c;
                    best = (i, j);
                    best_ids = key;
                }
            }
        }
        let (keep, dead) = best;
        let new_id = dendrogram.record(ids[keep], ids[dead], best_cost)?;

        let dead_members = std::mem::take(&mut clusters[dead].members);
        clusters[keep].members.extend(dead_members);
        active[dead] = false;
        ids[keep] = new_id;
        live -= 1;

        clusters[keep].centroid = center_of_members(m, &clusters[keep].members, p, &mut column);
        let mut dispersion = vec![0.0; m.n_features()];
        for &i in &clusters[keep].members {
            let row = m.row(i);
            for (d, (&x, &c)) in dispersion
                .iter_mut()
                .zip(row.iter().zip(&clusters[keep].centroid))
            {
                *d += pow_abs(x - c, p);
            }
        }
        clusters[keep].weights = weights_from_dispersion_row(&dispersion, p);

        for x in 0..k0 {
            if !active[x] || x == keep {
                continue;
            }
            let c = pair_cost(&clusters[x], &clusters[keep]);
            cost[x * k0 + keep] = c;
            cost[keep * k0 + x] = c;
        }
    }
    Ok(dendrogram)
}

/// Weighted Ward from singletons: leaves start with uniform weights, merged
/// centroids are Minkowski centers, and the weight update runs after every
/// merge.
pub fn ward_p(m: &DataMatrix, p: f64, k_target: usize) -> Result<Dendrogram> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    let v = m.n_features();
    let clusters: Vec<WeightedCluster> = (0..m.n_entities())
        .map(|i| WeightedCluster {
            members: vec![i],
            centroid: m.row(i).to_vec(),
            weights: vec![1.0 / v as f64; v],
        })
        .collect();
    weighted_agglomerate(m, clusters, p, p, k_target)
}

/// The full anomalous-pattern weighted pipeline.
#[derive(Debug, Clone)]
pub struct AWardPbResult {
    pub dendrogram: Dendrogram,
    /// State of the leaves as produced by the weighted k-means refinement.
    pub leaf_state: ClusterState,
    /// Cluster count found by the anomalous-pattern extraction.
    pub k_star: usize,
    pub imwk_dropped: usize,
    pub imwk_iterations: usize,
    pub init_time: Duration,
    pub merge_time: Duration,
}

impl AWardPbResult {
    pub fn entity_partition(&self, k: usize) -> Result<Partition> {
        compose_cut(&self.dendrogram, &self.leaf_state.partition, k)
    }
}

/// A-Ward with two exponents: anomalous-pattern extraction under the weighted
/// dissimilarity, weighted k-means refinement, then agglomeration under the
/// two-exponent merge cost down to `k_target`.
pub fn a_ward_pb(m: &DataMatrix, p: f64, beta: f64, k_target: usize) -> Result<AWardPbResult> {
    let started = Instant::now();
    let init = anomalous_init_pb(m, p, beta)?;
    let imwk = imwk_means_pb(m, &init, p, beta)?;
    let init_time = started.elapsed();

    let state = imwk.state;
    let k_leaves = state.k();
    if k_target > k_leaves {
        return Err(Error::KTargetExceedsInit {
            k: k_target,
            k_star: k_leaves,
        });
    }
    let members = state.partition.members();
    let clusters: Vec<WeightedCluster> = members
        .into_iter()
        .enumerate()
        .map(|(k, mem)| WeightedCluster {
            members: mem,
            centroid: state.centroids[k].clone(),
            weights: state.weights[k].clone(),
        })
        .collect();

    let merging = Instant::now();
    let dendrogram = weighted_agglomerate(m, clusters, p, beta, k_target)?;
    let merge_time = merging.elapsed();

    Ok(AWardPbResult {
        dendrogram,
        leaf_state: state,
        k_star: init.k_star,
        imwk_dropped: imwk.dropped_clusters,
        imwk_iterations: imwk.iterations,
        init_time,
        merge_time,
    })
}
