//! Partitional algorithms: k-means, anomalous-pattern extraction and the
//! weighted two-exponent variants that initialise the agglomerative engines.

use std::collections::HashSet;
use std::hash::{DefaultHasher, Hash, Hasher};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::minkowski::{
    center_of_members, dispersions, dpb_preweighted, dpb_preweighted_bounded, pow_abs,
    sq_euclidean, sq_euclidean_bounded, weights_from_dispersion_row,
};
use crate::partition::Partition;
use crate::state::ClusterState;

/// Hard cap on alternating-minimisation iterations; a breach is an error so a
/// pathological exponent pair cannot hang a grid search.
pub const MAX_ITERATIONS: usize = 10_000;

/// Assignments evolve deterministically from the previous assignment, so a
/// revisited state means the loop cycles forever; failing immediately is
/// equivalent to exhausting the iteration cap.
fn assignment_fingerprint(labels: &[usize]) -> u64 {
    let mut h = DefaultHasher::new();
    labels.hash(&mut h);
    h.finish()
}

/// Output of the anomalous-pattern extraction loop: one centroid and weight
/// vector per extracted cluster.
#[derive(Debug, Clone)]
pub struct AnomalousInit {
    pub centroids: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
    pub k_star: usize,
    /// Cardinality of each cluster at the moment it was extracted.
    pub extraction_sizes: Vec<usize>,
}

/// Result of a k-means run.
#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub partition: Partition,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares after each full iteration.
    pub wcss_trace: Vec<f64>,
    /// Number of clusters that emptied and were dropped.
    pub dropped_clusters: usize,
    pub iterations: usize,
}

/// Nearest centroid by squared Euclidean distance, ties to the lowest index.
/// Probing `hint` first makes the early-exit bound tight immediately, which
/// prunes most full distance evaluations on later iterations.
fn nearest_centroid(row: &[f64], centroids: &[Vec<f64>], hint: usize) -> usize {
    let start = if hint < centroids.len() { hint } else { 0 };
    let mut best = start;
    let mut best_d = sq_euclidean(row, &centroids[start]);
    for (k, c) in centroids.iter().enumerate() {
        if k == best {
            continue;
        }
        let d = sq_euclidean_bounded(row, c, best_d);
        if d < best_d || (d == best_d && k < best) {
            best_d = d;
            best = k;
        }
    }
    best
}

fn means_of(m: &DataMatrix, labels: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let v = m.n_features();
    let mut sums = vec![vec![0.0; v]; k];
    let mut counts = vec![0usize; k];
    for (i, row) in m.rows().enumerate() {
        let c = labels[i];
        counts[c] += 1;
        for (s, &x) in sums[c].iter_mut().zip(row) {
            *s += x;
        }
    }
    for (sum, &count) in sums.iter_mut().zip(&counts) {
        if count > 0 {
            for s in sum.iter_mut() {
                *s /= count as f64;
            }
        }
    }
    (sums, counts)
}

fn wcss(m: &DataMatrix, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    m.rows()
        .enumerate()
        .map(|(i, row)| sq_euclidean(row, &centroids[labels[i]]))
        .sum()
}

/// Batch k-means from explicit starting centroids: alternate nearest-centroid
/// assignment and mean updates until no assignment changes. A cluster that
/// empties is dropped and the run continues with one cluster fewer.
pub fn kmeans(m: &DataMatrix, init_centroids: &[Vec<f64>]) -> Result<KMeansResult> {
    let n = m.n_entities();
    let v = m.n_features();
    if init_centroids.is_empty() {
        return Err(Error::EmptyInput("initial centroids"));
    }
    if init_centroids.len() > n {
        return Err(Error::InvalidParameter(format!(
            "{} initial centroids for {} entities",
            init_centroids.len(),
            n
        )));
    }
    if init_centroids.iter().any(|c| c.len() != v) {
        return Err(Error::DimensionMismatch("centroid width".into()));
    }

    let mut centroids: Vec<Vec<f64>> = init_centroids.to_vec();
    let mut labels: Vec<usize> = vec![usize::MAX; n];
    let mut dropped = 0usize;
    let mut trace = Vec::new();

    for iteration in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, row) in m.rows().enumerate() {
            let k = nearest_centroid(row, &centroids, labels[i]);
            if k != labels[i] {
                labels[i] = k;
                changed = true;
            }
        }
        if !changed {
            let partition = Partition::from_dense(labels, centroids.len())?;
            return Ok(KMeansResult {
                partition,
                centroids,
                wcss_trace: trace,
                dropped_clusters: dropped,
                iterations: iteration,
            });
        }

        let (means, counts) = means_of(m, &labels, centroids.len());
        if counts.contains(&0) {
            // Compact out emptied clusters; nobody points at them, so only
            // the indices shift.
            let mut remap = vec![usize::MAX; centroids.len()];
            let mut kept = Vec::new();
            for (k, &count) in counts.iter().enumerate() {
                if count > 0 {
                    remap[k] = kept.len();
                    kept.push(means[k].clone());
                } else {
                    dropped += 1;
                }
            }
            for l in labels.iter_mut() {
                *l = remap[*l];
            }
            centroids = kept;
        } else {
            centroids = means;
        }
        trace.push(wcss(m, &labels, &centroids));
    }
    Err(Error::IterationLimit(MAX_ITERATIONS))
}

/// Result of the anomalous-cluster identification algorithm: the extraction
/// loop plus the final k-means pass seeded with the saved centroids.
#[derive(Debug, Clone)]
pub struct IkMeansResult {
    pub init: AnomalousInit,
    pub partition: Partition,
    pub centroids: Vec<Vec<f64>>,
    pub kmeans_iterations: usize,
    pub dropped_clusters: usize,
}

impl IkMeansResult {
    pub fn k_star(&self) -> usize {
        self.init.k_star
    }
}

/// Extracts anomalous clusters one at a time: seed the tentative centroid at
/// the entity farthest from the grand center, grow it by two-center
/// assignment against the fixed grand center, save it if it has at least
/// `theta` members, remove it, and repeat until the data is exhausted. The
/// saved centroids then seed a k-means pass over the full data set.
///
/// The grand center is computed once and never updated. Ties for the
/// farthest entity go to the lowest index; an entity equidistant from both
/// centers stays with the grand center, except the seeding entity itself,
/// which always belongs to the tentative cluster (this also guarantees every
/// extraction removes at least one entity).
pub fn ik_means(m: &DataMatrix, theta: usize) -> Result<IkMeansResult> {
    if theta < 1 {
        return Err(Error::InvalidParameter("theta must be >= 1".into()));
    }
    let grand = m.grand_mean();
    let n = m.n_entities();

    let mut remaining: Vec<usize> = (0..n).collect();
    let dist_to_grand: Vec<f64> = (0..n).map(|i| sq_euclidean(m.row(i), &grand)).collect();

    let mut saved_centroids: Vec<Vec<f64>> = Vec::new();
    let mut extraction_sizes: Vec<usize> = Vec::new();

    while !remaining.is_empty() {
        // Tentative centroid: farthest remaining entity from the grand center.
        let seed = *remaining
            .iter()
            .max_by(|&&a, &&b| {
                dist_to_grand[a]
                    .partial_cmp(&dist_to_grand[b])
                    .unwrap()
                    .then(b.cmp(&a)) // ties: lowest entity index wins
            })
            .unwrap();
        let mut centroid: Vec<f64> = m.row(seed).to_vec();
        let mut cluster: Vec<usize> = Vec::new();

        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let mut next: Vec<usize> = Vec::with_capacity(cluster.len().max(1));
            for &i in &remaining {
                let dy = dist_to_grand[i];
                let dt = sq_euclidean_bounded(m.row(i), &centroid, dy);
                if dt < dy || (dt == dy && i == seed) {
                    next.push(i);
                }
            }
            if next == cluster {
                converged = true;
                break;
            }
            if next.is_empty() {
                // The tentative centroid lost every entity; keep the previous
                // cluster rather than averaging an empty set.
                converged = true;
                break;
            }
            cluster = next;
            let mut mean = vec![0.0; m.n_features()];
            for &i in &cluster {
                for (s, &x) in mean.iter_mut().zip(m.row(i)) {
                    *s += x;
                }
            }
            for s in &mut mean {
                *s /= cluster.len() as f64;
            }
            centroid = mean;
        }
        if !converged {
            return Err(Error::IterationLimit(MAX_ITERATIONS));
        }

        if cluster.len() >= theta {
            saved_centroids.push(centroid);
            extraction_sizes.push(cluster.len());
        }
        remaining.retain(|i| !cluster.contains(i));
    }

    if saved_centroids.is_empty() {
        return Err(Error::NoAnomalousClusters { theta });
    }

    let v = m.n_features();
    let k_star = saved_centroids.len();
    let run = kmeans(m, &saved_centroids)?;
    Ok(IkMeansResult {
        init: AnomalousInit {
            centroids: saved_centroids,
            weights: vec![vec![1.0 / v as f64; v]; k_star],
            k_star,
            extraction_sizes,
        },
        partition: run.partition,
        centroids: run.centroids,
        kmeans_iterations: run.iterations,
        dropped_clusters: run.dropped_clusters,
    })
}

/// Anomalous-pattern extraction under the two-exponent weighted dissimilarity.
/// The grand center is the Minkowski center of the full data set, fixed once.
/// Each extraction is a two-cluster subproblem: the tentative cluster around
/// its Minkowski center versus the rest around the grand center. Both sides
/// start from uniform weights and both follow the inverse-dispersion update
/// each loop. Every extracted cluster is saved (theta is fixed at 1 here).
pub fn anomalous_init_pb(m: &DataMatrix, p: f64, beta: f64) -> Result<AnomalousInit> {
    if !(p > 1.0) || !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "exponents must exceed 1, got p = {p}, beta = {beta}"
        )));
    }
    let n = m.n_entities();
    let v = m.n_features();
    let uniform = vec![1.0 / v as f64; v];
    let uniform_beta: Vec<f64> = uniform.iter().map(|w| w.powf(beta)).collect();

    let mut column = Vec::with_capacity(n);
    let all: Vec<usize> = (0..n).collect();
    let grand = center_of_members(m, &all, p, &mut column);
    // The grand center never moves, so per-entity feature gaps to it can be
    // computed once; a weighted distance is then a dot product.
    let grand_gaps: Vec<f64> = (0..n)
        .flat_map(|i| {
            m.row(i)
                .iter()
                .zip(&grand)
                .map(|(&x, &c)| pow_abs(x - c, p))
                .collect::<Vec<f64>>()
        })
        .collect();
    let grand_dist = |i: usize, w_beta: &[f64]| -> f64 {
        grand_gaps[i * v..(i + 1) * v]
            .iter()
            .zip(w_beta)
            .map(|(&g, &w)| w * g)
            .sum()
    };

    let mut remaining = all;
    let mut saved_centroids: Vec<Vec<f64>> = Vec::new();
    let mut saved_weights: Vec<Vec<f64>> = Vec::new();
    let mut extraction_sizes: Vec<usize> = Vec::new();

    while !remaining.is_empty() {
        // Both weight vectors reset to uniform for each extraction; the
        // farthest-entity seeding therefore uses unweighted geometry.
        let seed = *remaining
            .iter()
            .max_by(|&&a, &&b| {
                grand_dist(a, &uniform_beta)
                    .partial_cmp(&grand_dist(b, &uniform_beta))
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        let mut centroid: Vec<f64> = m.row(seed).to_vec();
        let mut weights = uniform.clone();
        let mut weights_beta = uniform_beta.clone();
        let mut grand_weights_beta = uniform_beta.clone();
        let mut cluster: Vec<usize> = Vec::new();
        let mut seen: HashSet<u64> = HashSet::new();

        // dispersion of all remaining entities around the grand center; the
        // complement's dispersion is this minus the tentative cluster's share
        let mut remaining_disp = vec![0.0; v];
        for &i in &remaining {
            for (d, &g) in remaining_disp.iter_mut().zip(&grand_gaps[i * v..(i + 1) * v]) {
                *d += g;
            }
        }

        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let mut next: Vec<usize> = Vec::with_capacity(cluster.len().max(1));
            for &i in &remaining {
                let dy = grand_dist(i, &grand_weights_beta);
                let dt = dpb_preweighted_bounded(m.row(i), &centroid, &weights_beta, p, dy);
                if dt < dy || (dt == dy && i == seed) {
                    next.push(i);
                }
            }
            if next == cluster {
                converged = true;
                break;
            }
            if next.is_empty() {
                converged = true;
                break;
            }
            if !seen.insert(assignment_fingerprint(&next)) {
                return Err(Error::IterationLimit(MAX_ITERATIONS));
            }
            cluster = next;
            centroid = center_of_members(m, &cluster, p, &mut column);
            let mut dispersion = vec![0.0; v];
            for &i in &cluster {
                let row = m.row(i);
                for (d, (&x, &c)) in dispersion.iter_mut().zip(row.iter().zip(&centroid)) {
                    *d += pow_abs(x - c, p);
                }
            }
            weights = weights_from_dispersion_row(&dispersion, p);
            weights_beta = weights.iter().map(|w| w.powf(beta)).collect();

            // complement cluster: everything else, spread around the fixed
            // grand center
            let grand_weights = if cluster.len() == remaining.len() {
                uniform.clone()
            } else {
                let mut grand_dispersion = remaining_disp.clone();
                for &i in &cluster {
                    let gaps = &grand_gaps[i * v..(i + 1) * v];
                    for (d, &g) in grand_dispersion.iter_mut().zip(gaps) {
                        *d -= g;
                    }
                }
                // cancellation can leave tiny negatives
                for d in &mut grand_dispersion {
                    if *d < 0.0 {
                        *d = 0.0;
                    }
                }
                weights_from_dispersion_row(&grand_dispersion, p)
            };
            grand_weights_beta = grand_weights.iter().map(|w| w.powf(beta)).collect();
        }
        if !converged {
            return Err(Error::IterationLimit(MAX_ITERATIONS));
        }

        saved_centroids.push(centroid);
        saved_weights.push(weights);
        extraction_sizes.push(cluster.len());
        remaining.retain(|i| !cluster.contains(i));
    }

    let k_star = saved_centroids.len();
    Ok(AnomalousInit {
        centroids: saved_centroids,
        weights: saved_weights,
        k_star,
        extraction_sizes,
    })
}

/// Result of the weighted two-exponent k-means refinement.
#[derive(Debug, Clone)]
pub struct ImwkResult {
    pub state: ClusterState,
    /// Objective value measured after the assignment step and again after
    /// the centroid/weight updates, once per iteration.
    pub objective_trace: Vec<(f64, f64)>,
    pub dropped_clusters: usize,
    pub iterations: usize,
}

/// Weighted Minkowski k-means with decoupled exponents: alternate assignment
/// under the weighted dissimilarity, Minkowski-center centroid updates and
/// inverse-dispersion weight updates until assignments stabilise. Emptied
/// clusters are dropped and reported.
pub fn imwk_means_pb(
    m: &DataMatrix,
    init: &AnomalousInit,
    p: f64,
    beta: f64,
) -> Result<ImwkResult> {
    if !(p > 1.0) || !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "exponents must exceed 1, got p = {p}, beta = {beta}"
        )));
    }
    if init.centroids.is_empty() {
        return Err(Error::EmptyInput("anomalous initialisation"));
    }
    let n = m.n_entities();
    let v = m.n_features();
    if init.centroids.iter().any(|c| c.len() != v)
        || init.weights.iter().any(|w| w.len() != v)
        || init.weights.len() != init.centroids.len()
    {
        return Err(Error::DimensionMismatch(
            "initialisation shape does not match the matrix".into(),
        ));
    }

    let mut centroids = init.centroids.clone();
    let mut weights = init.weights.clone();
    let mut weights_beta: Vec<Vec<f64>> = weights
        .iter()
        .map(|row| row.iter().map(|w| w.powf(beta)).collect())
        .collect();
    let mut labels: Vec<usize> = vec![usize::MAX; n];
    let mut dropped = 0usize;
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut column = Vec::with_capacity(n);
    let mut seen: HashSet<u64> = HashSet::new();

    let objective = |labels: &[usize], centroids: &[Vec<f64>], wb: &[Vec<f64>]| -> f64 {
        m.rows()
            .enumerate()
            .map(|(i, row)| dpb_preweighted(row, &centroids[labels[i]], &wb[labels[i]], p))
            .sum()
    };

    for iteration in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, row) in m.rows().enumerate() {
            let hint = labels[i];
            let start = if hint < centroids.len() { hint } else { 0 };
            let mut best = start;
            let mut best_d = dpb_preweighted(row, &centroids[start], &weights_beta[start], p);
            for (k, c) in centroids.iter().enumerate() {
                if k == best {
                    continue;
                }
                let d = dpb_preweighted_bounded(row, c, &weights_beta[k], p, best_d);
                if d < best_d || (d == best_d && k < best) {
                    best_d = d;
                    best = k;
                }
            }
            if best != labels[i] {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            let partition = Partition::from_dense(labels, centroids.len())?;
            let state = ClusterState::new(partition, centroids, weights, p, beta)?;
            return Ok(ImwkResult {
                state,
                objective_trace: trace,
                dropped_clusters: dropped,
                iterations: iteration,
            });
        }
        if !seen.insert(assignment_fingerprint(&labels)) {
            return Err(Error::IterationLimit(MAX_ITERATIONS));
        }

        let mut counts = vec![0usize; centroids.len()];
        for &l in &labels {
            counts[l] += 1;
        }
        if counts.contains(&0) {
            let mut remap = vec![usize::MAX; centroids.len()];
            let mut kept_c = Vec::new();
            let mut kept_w = Vec::new();
            for (k, &count) in counts.iter().enumerate() {
                if count > 0 {
                    remap[k] = kept_c.len();
                    kept_c.push(centroids[k].clone());
                    kept_w.push(weights[k].clone());
                } else {
                    dropped += 1;
                }
            }
            for l in labels.iter_mut() {
                *l = remap[*l];
            }
            centroids = kept_c;
            weights = kept_w;
            weights_beta = weights
                .iter()
                .map(|row| row.iter().map(|w| w.powf(beta)).collect())
                .collect();
        }
        let after_assignment = objective(&labels, &centroids, &weights_beta);

        let partition = Partition::from_dense(labels.clone(), centroids.len())?;
        let members = partition.members();
        for (k, mem) in members.iter().enumerate() {
            centroids[k] = center_of_members(m, mem, p, &mut column);
        }
        let disp = dispersions(m, &partition, &centroids, p)?;
        weights = disp
            .d
            .iter()
            .map(|row| weights_from_dispersion_row(row, p))
            .collect();
        weights_beta = weights
            .iter()
            .map(|row| row.iter().map(|w| w.powf(beta)).collect())
            .collect();

        trace.push((
            after_assignment,
            objective(&labels, &centroids, &weights_beta),
        ));
    }
    Err(Error::IterationLimit(MAX_ITERATIONS))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_1d(values: &[f64]) -> DataMatrix {
        DataMatrix::from_rows(values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn kmeans_separated_pairs() {
        let m = matrix_1d(&[0.0, 0.1, 10.0, 10.1]);
        let r = kmeans(&m, &[vec![0.0], vec![10.0]]).unwrap();
        assert_eq!(r.partition.labels(), &[0, 0, 1, 1]);
        assert!((r.centroids[0][0] - 0.05).abs() < 1e-12);
        assert!((r.centroids[1][0] - 10.05).abs() < 1e-12);
        assert_eq!(r.dropped_clusters, 0);
    }

    #[test]
    fn kmeans_fixed_point_converges_in_one_pass() {
        let m = matrix_1d(&[0.0, 0.1, 10.0, 10.1]);
        let r = kmeans(&m, &[vec![0.05], vec![10.05]]).unwrap();
        assert_eq!(r.partition.labels(), &[0, 0, 1, 1]);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn kmeans_k1_is_grand_mean() {
        let m = matrix_1d(&[1.0, 2.0, 6.0]);
        let r = kmeans(&m, &[vec![0.0]]).unwrap();
        assert_eq!(r.partition.k(), 1);
        assert!((r.centroids[0][0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kmeans_drops_empty_cluster() {
        // both seeds near the same mass; the far seed attracts nothing
        let m = matrix_1d(&[0.0, 0.1, 0.2]);
        let r = kmeans(&m, &[vec![0.1], vec![100.0]]).unwrap();
        assert_eq!(r.partition.k(), 1);
        assert_eq!(r.dropped_clusters, 1);
    }

    #[test]
    fn kmeans_wcss_non_increasing() {
        let m = DataMatrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![0.5, 1.0],
            vec![4.0, 4.0],
            vec![4.5, 3.5],
            vec![9.0, 0.5],
            vec![8.5, 1.0],
        ])
        .unwrap();
        let r = kmeans(&m, &[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        for w in r.wcss_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "wcss rose: {:?}", w);
        }
    }

    // Hand trace of the extraction loop on {-0.1, 0, 0.1, 5}: the grand mean
    // is 1.25, the farthest entity is 5 and forms the first anomalous
    // cluster; the remainder forms the second around 0.
    #[test]
    fn ik_means_hand_trace() {
        let m = matrix_1d(&[-0.1, 0.0, 0.1, 5.0]);
        let r = ik_means(&m, 1).unwrap();
        assert_eq!(r.k_star(), 2);
        assert!((r.init.centroids[0][0] - 5.0).abs() < 1e-12);
        assert!(r.init.centroids[1][0].abs() < 1e-12);
        assert_eq!(r.init.extraction_sizes, vec![1, 3]);
        assert_eq!(r.partition.labels(), &[1, 1, 1, 0]);
    }

    #[test]
    fn ik_means_single_point() {
        let m = matrix_1d(&[3.0]);
        let r = ik_means(&m, 1).unwrap();
        assert_eq!(r.k_star(), 1);
        assert_eq!(r.partition.labels(), &[0]);
    }

    #[test]
    fn ik_means_mirrored_blobs() {
        let m = matrix_1d(&[-5.0, -5.1, -4.9, 4.9, 5.0, 5.1]);
        let r = ik_means(&m, 1).unwrap();
        assert_eq!(r.k_star(), 2);
        let p = &r.partition;
        assert_eq!(p.label(0), p.label(1));
        assert_eq!(p.label(0), p.label(2));
        assert_eq!(p.label(3), p.label(4));
        assert_eq!(p.label(3), p.label(5));
        assert_ne!(p.label(0), p.label(3));
    }

    #[test]
    fn ik_means_theta_too_large() {
        let m = matrix_1d(&[0.0, 10.0]);
        assert!(matches!(
            ik_means(&m, 5),
            Err(Error::NoAnomalousClusters { theta: 5 })
        ));
    }

    #[test]
    fn ik_means_extraction_sizes_cover_data_at_theta_one() {
        let m = DataMatrix::from_rows(vec![
            vec![0.0, 1.0],
            vec![0.2, 0.8],
            vec![5.0, 5.0],
            vec![5.2, 5.1],
            vec![-3.0, 2.0],
            vec![9.0, -4.0],
        ])
        .unwrap();
        let r = ik_means(&m, 1).unwrap();
        let total: usize = r.init.extraction_sizes.iter().sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn anomalous_pb_single_entity() {
        let m = DataMatrix::from_rows(vec![vec![2.0, -1.0]]).unwrap();
        let init = anomalous_init_pb(&m, 2.0, 2.0).unwrap();
        assert_eq!(init.k_star, 1);
        assert_eq!(init.centroids[0], vec![2.0, -1.0]);
        assert_eq!(init.weights[0], vec![0.5, 0.5]);
    }

    // In 1-D the weight is forced to 1 by normalisation, so the pb extraction
    // reduces to ik-means with a Minkowski center in place of the mean.
    #[test]
    fn anomalous_pb_1d_matches_ik_means_trace() {
        let m = matrix_1d(&[-0.1, 0.0, 0.1, 5.0]);
        let init = anomalous_init_pb(&m, 2.0, 2.0).unwrap();
        assert_eq!(init.k_star, 2);
        assert!((init.centroids[0][0] - 5.0).abs() < 1e-9);
        assert!(init.centroids[1][0].abs() < 1e-9);
        assert_eq!(init.weights[0], vec![1.0]);
        let total: usize = init.extraction_sizes.iter().sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn imwk_1d_p2_behaves_like_kmeans() {
        let m = matrix_1d(&[0.0, 0.1, 10.0, 10.1]);
        let init = AnomalousInit {
            centroids: vec![vec![0.0], vec![10.0]],
            weights: vec![vec![1.0], vec![1.0]],
            k_star: 2,
            extraction_sizes: vec![2, 2],
        };
        let r = imwk_means_pb(&m, &init, 2.0, 2.0).unwrap();
        assert_eq!(r.state.partition.labels(), &[0, 0, 1, 1]);
        assert!((r.state.centroids[0][0] - 0.05).abs() < 1e-9);
        assert!((r.state.centroids[1][0] - 10.05).abs() < 1e-9);
        assert_eq!(r.state.weights[0], vec![1.0]);
    }

    #[test]
    fn imwk_fixed_point_returns_input() {
        let m = matrix_1d(&[0.0, 0.1, 10.0, 10.1]);
        let init = AnomalousInit {
            centroids: vec![vec![0.05], vec![10.05]],
            weights: vec![vec![1.0], vec![1.0]],
            k_star: 2,
            extraction_sizes: vec![2, 2],
        };
        let r = imwk_means_pb(&m, &init, 2.0, 2.0).unwrap();
        assert_eq!(r.state.partition.labels(), &[0, 0, 1, 1]);
        assert_eq!(r.iterations, 1);
        assert!((r.state.centroids[0][0] - 0.05).abs() < 1e-12);
    }

    // Two clusters separated along feature 1, feature 2 pure noise: the
    // converged weights must favour the separating feature in both clusters.
    #[test]
    fn imwk_weights_favour_informative_feature() {
        let noise = [0.31, -0.44, 0.12, -0.05, 0.27, -0.33, 0.18, -0.21];
        let mut rows = Vec::new();
        for i in 0..4 {
            rows.push(vec![0.0 + 0.01 * i as f64, noise[i] * 2.0]);
        }
        for i in 0..4 {
            rows.push(vec![10.0 + 0.01 * i as f64, noise[4 + i] * 2.0]);
        }
        let m = DataMatrix::from_rows(rows).unwrap();
        let init = AnomalousInit {
            centroids: vec![vec![0.0, 0.0], vec![10.0, 0.0]],
            weights: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            k_star: 2,
            extraction_sizes: vec![4, 4],
        };
        let r = imwk_means_pb(&m, &init, 2.0, 2.0).unwrap();
        assert_eq!(r.state.partition.labels(), &[0, 0, 0, 0, 1, 1, 1, 1]);
        for k in 0..2 {
            assert!(
                r.state.weights[k][0] > r.state.weights[k][1],
                "cluster {k}: {:?}",
                r.state.weights[k]
            );
        }
    }

    #[test]
    fn imwk_objective_monotone_when_beta_equals_p() {
        let m = DataMatrix::from_rows(vec![
            vec![0.0, 0.3],
            vec![0.4, -0.2],
            vec![0.1, 0.1],
            vec![7.0, 3.0],
            vec![7.5, 2.8],
            vec![6.8, 3.3],
            vec![-4.0, -6.0],
            vec![-4.4, -5.5],
        ])
        .unwrap();
        let init = anomalous_init_pb(&m, 3.0, 3.0).unwrap();
        let r = imwk_means_pb(&m, &init, 3.0, 3.0).unwrap();
        // within an iteration: updates may not raise the objective
        for &(after_assign, after_update) in &r.objective_trace {
            assert!(after_update <= after_assign + 1e-9);
        }
        // across iterations: assignment may not raise it either
        for w in r.objective_trace.windows(2) {
            assert!(w[1].0 <= w[0].1 + 1e-9);
        }
    }

    #[test]
    fn imwk_assignment_step_monotone_when_beta_differs() {
        let m = DataMatrix::from_rows(vec![
            vec![0.0, 0.3],
            vec![0.4, -0.2],
            vec![0.1, 0.1],
            vec![7.0, 3.0],
            vec![7.5, 2.8],
            vec![6.8, 3.3],
            vec![-4.0, -6.0],
            vec![-4.4, -5.5],
        ])
        .unwrap();
        let init = anomalous_init_pb(&m, 2.0, 3.5).unwrap();
        let r = imwk_means_pb(&m, &init, 2.0, 3.5).unwrap();
        for w in r.objective_trace.windows(2) {
            assert!(w[1].0 <= w[0].1 + 1e-9);
        }
    }
}
