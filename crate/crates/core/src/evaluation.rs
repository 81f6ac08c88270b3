//! Cluster-recovery and validity indices: the chance-corrected Rand index and
//! the Silhouette width under three dissimilarities.

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::minkowski::pow_abs;
use crate::partition::Partition;

/// Cross-tabulation of two partitions over the same entities.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub n: u64,
}

pub fn contingency(a: &Partition, b: &Partition) -> Result<ContingencyTable> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "partitions over {} and {} entities",
            a.len(),
            b.len()
        )));
    }
    let mut counts = vec![vec![0u64; b.k()]; a.k()];
    for i in 0..a.len() {
        counts[a.label(i)][b.label(i)] += 1;
    }
    let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let mut col_sums = vec![0u64; b.k()];
    for row in &counts {
        for (c, &v) in col_sums.iter_mut().zip(row) {
            *c += v;
        }
    }
    Ok(ContingencyTable {
        counts,
        row_sums,
        col_sums,
        n: a.len() as u64,
    })
}

#[inline]
fn choose2(x: u64) -> u128 {
    (x as u128) * (x.saturating_sub(1) as u128) / 2
}

fn same_up_to_relabel(a: &Partition, b: &Partition) -> bool {
    if a.len() != b.len() || a.k() != b.k() {
        return false;
    }
    let ca = Partition::from_labels(a.labels()).expect("non-empty");
    let cb = Partition::from_labels(b.labels()).expect("non-empty");
    ca.labels() == cb.labels()
}

/// Adjusted Rand Index in [-1, 1]; 1 exactly when the partitions coincide up
/// to relabeling. Binomials are accumulated in wide integers and divided in
/// floating point only at the end. When the chance-correction denominator
/// degenerates (both partitions trivial), coincidence yields 1 and anything
/// else 0.
pub fn adjusted_rand(a: &Partition, b: &Partition) -> Result<f64> {
    let table = contingency(a, b)?;
    let sum_ij: u128 = table
        .counts
        .iter()
        .flat_map(|row| row.iter().map(|&c| choose2(c)))
        .sum();
    let sum_a: u128 = table.row_sums.iter().map(|&c| choose2(c)).sum();
    let sum_b: u128 = table.col_sums.iter().map(|&c| choose2(c)).sum();
    let pairs = choose2(table.n);

    if pairs == 0 {
        // single entity: partitions trivially coincide
        return Ok(1.0);
    }
    let expected = (sum_a as f64) * (sum_b as f64) / (pairs as f64);
    let max_index = 0.5 * (sum_a as f64 + sum_b as f64) - expected;
    let index = sum_ij as f64 - expected;
    if max_index == 0.0 {
        return Ok(if same_up_to_relabel(a, b) { 1.0 } else { 0.0 });
    }
    Ok(index / max_index)
}

/// Dissimilarity used by the Silhouette width. The Minkowski option is the
/// rooted metric `(sum |.|^p)^(1/p)`; the clustering criteria themselves stay
/// in power form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SilhouetteMetric {
    SqEuclidean,
    Manhattan,
    Minkowski(f64),
}

impl SilhouetteMetric {
    fn validate(&self) -> Result<()> {
        if let SilhouetteMetric::Minkowski(p) = self {
            if !(*p > 1.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "minkowski silhouette exponent must exceed 1, got {p}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            SilhouetteMetric::SqEuclidean => {
                let mut acc = 0.0;
                for (&a, &b) in x.iter().zip(y) {
                    let d = a - b;
                    acc += d * d;
                }
                acc
            }
            SilhouetteMetric::Manhattan => {
                let mut acc = 0.0;
                for (&a, &b) in x.iter().zip(y) {
                    acc += (a - b).abs();
                }
                acc
            }
            SilhouetteMetric::Minkowski(p) => {
                let mut acc = 0.0;
                for (&a, &b) in x.iter().zip(y) {
                    acc += pow_abs(a - b, p);
                }
                acc.powf(1.0 / p)
            }
        }
    }
}

/// Condensed upper-triangle matrix of pairwise dissimilarities.
#[derive(Debug, Clone)]
pub struct PairwiseDistances {
    n: usize,
    data: Vec<f64>,
}

impl PairwiseDistances {
    pub fn compute(m: &DataMatrix, metric: SilhouetteMetric) -> Result<Self> {
        metric.validate()?;
        let n = m.n_entities();
        let mut data = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            let ri = m.row(i);
            for j in (i + 1)..n {
                data.push(metric.distance(ri, m.row(j)));
            }
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j);
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.data[i * self.n - i * (i + 1) / 2 + (j - i - 1)]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Mean Silhouette width of a partition: per entity, `(b - a) / max(a, b)`
/// where `a` is the average dissimilarity to its own cluster and `b` the
/// smallest average dissimilarity to another cluster. Entities alone in
/// their cluster score 0.
pub fn silhouette(m: &DataMatrix, s: &Partition, metric: SilhouetteMetric) -> Result<f64> {
    if s.len() != m.n_entities() {
        return Err(Error::DimensionMismatch(format!(
            "partition over {} entities for a matrix with {}",
            s.len(),
            m.n_entities()
        )));
    }
    let d = PairwiseDistances::compute(m, metric)?;
    silhouette_from_pairwise(&d, s)
}

/// Silhouette width over precomputed pairwise dissimilarities (the grid
/// search reuses one matrix across many cells).
pub fn silhouette_from_pairwise(d: &PairwiseDistances, s: &Partition) -> Result<f64> {
    let n = d.n();
    if s.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "partition over {} entities for {} pairwise rows",
            s.len(),
            n
        )));
    }
    if s.k() < 2 {
        return Err(Error::InvalidParameter(
            "silhouette needs at least two clusters".into(),
        ));
    }
    if n < 2 {
        return Err(Error::EmptyInput("silhouette needs at least two entities"));
    }
    let sizes = s.cluster_sizes();
    let mut total = 0.0;
    let mut sums = vec![0.0f64; s.k()];
    for i in 0..n {
        for v in sums.iter_mut() {
            *v = 0.0;
        }
        for j in 0..n {
            if j != i {
                sums[s.label(j)] += d.get(i, j);
            }
        }
        let own = s.label(i);
        if sizes[own] == 1 {
            continue; // singleton scores 0
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for k in 0..s.k() {
            if k != own {
                let avg = sums[k] / sizes[k] as f64;
                if avg < b {
                    b = avg;
                }
            }
        }
        if a != b {
            total += (b - a) / a.max(b);
        }
    }
    Ok(total / n as f64)
}
