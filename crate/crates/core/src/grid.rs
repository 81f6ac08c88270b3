//! Exponent grid search: run a weighted algorithm over a lattice of p (and
//! beta) values, score every cell, and select by Silhouette or by best ARI
//! against a known truth.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::agglomerative::{a_ward_pb, ward_p};
use crate::error::{Error, Result};
use crate::evaluation::{
    adjusted_rand, silhouette_from_pairwise, PairwiseDistances, SilhouetteMetric,
};
use crate::matrix::DataMatrix;
use crate::partition::Partition;

/// Which algorithm the grid drives. The single-exponent variant spans p only;
/// the two-exponent variant spans the full p x beta lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridAlgorithm {
    WardP,
    AWardPb,
}

/// Silhouette dissimilarity choice for cell scoring. `Minkowski` resolves to
/// the same p the cell's clustering ran with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricChoice {
    SqEuclidean,
    Manhattan,
    Minkowski,
}

impl MetricChoice {
    pub fn resolve(self, p: f64) -> SilhouetteMetric {
        match self {
            MetricChoice::SqEuclidean => SilhouetteMetric::SqEuclidean,
            MetricChoice::Manhattan => SilhouetteMetric::Manhattan,
            MetricChoice::Minkowski => SilhouetteMetric::Minkowski(p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricChoice::SqEuclidean => "sq_euclidean",
            MetricChoice::Manhattan => "manhattan",
            MetricChoice::Minkowski => "minkowski",
        }
    }
}

/// The exponent lattice. Values live on the 0.1 grid inside [1.1, 5.0].
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub p_values: Vec<f64>,
    pub beta_values: Vec<f64>,
}

impl GridSpec {
    /// The full 1.1, 1.2, ..., 5.0 lattice (40 values per exponent).
    pub fn full() -> Self {
        Self::with_step_tenths(1).expect("step 1 is valid")
    }

    /// A thinned lattice walking the 0.1 grid in strides of `step_tenths`
    /// (e.g. 3 gives 1.1, 1.4, ..., 5.0).
    pub fn with_step_tenths(step_tenths: usize) -> Result<Self> {
        if step_tenths == 0 || step_tenths > 39 {
            return Err(Error::InvalidParameter(format!(
                "grid step of {step_tenths} tenths"
            )));
        }
        let values: Vec<f64> = (11..=50)
            .step_by(step_tenths)
            .map(|i| i as f64 / 10.0)
            .collect();
        Ok(Self {
            p_values: values.clone(),
            beta_values: values,
        })
    }

    /// A single-cell grid, useful for pinning one exponent pair.
    pub fn single(p: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("beta", beta)] {
            if !(1.1..=5.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside the [1.1, 5.0] lattice"
                )));
            }
        }
        Ok(Self {
            p_values: vec![p],
            beta_values: vec![beta],
        })
    }
}

/// One evaluated lattice point.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub p: f64,
    pub beta: Option<f64>,
    pub silhouette: Option<f64>,
    pub ari_vs_truth: Option<f64>,
    pub runtime_ms: f64,
    pub partition: Option<Partition>,
    pub error: Option<String>,
}

/// All evaluated cells plus argmax bookkeeping.
#[derive(Debug, Clone)]
pub struct GridResult {
    pub cells: Vec<GridCell>,
    pub metric: Option<MetricChoice>,
}

impl GridResult {
    /// Index of the maximum-silhouette cell among cells that succeeded.
    pub fn best_by_silhouette(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, cell) in self.cells.iter().enumerate() {
            if let Some(s) = cell.silhouette {
                if best.map(|(_, b)| s > b).unwrap_or(true) {
                    best = Some((i, s));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Index of the maximum-ARI cell (the "best possible" protocol).
    pub fn best_by_ari(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, cell) in self.cells.iter().enumerate() {
            if let Some(a) = cell.ari_vs_truth {
                if best.map(|(_, b)| a > b).unwrap_or(true) {
                    best = Some((i, a));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn best_ari_value(&self) -> Option<f64> {
        self.best_by_ari().and_then(|i| self.cells[i].ari_vs_truth)
    }
}

fn run_cell(
    m: &DataMatrix,
    k_target: usize,
    algorithm: GridAlgorithm,
    p: f64,
    beta: Option<f64>,
) -> Result<Partition> {
    match algorithm {
        GridAlgorithm::WardP => ward_p(m, p, k_target)?.cut(k_target),
        GridAlgorithm::AWardPb => {
            a_ward_pb(m, p, beta.expect("beta required"), k_target)?.entity_partition(k_target)
        }
    }
}

/// Runs the algorithm at every lattice point, scoring each cell with the
/// requested Silhouette metric and/or ARI against a known truth. Failed cells
/// are recorded with their error and excluded from the argmax; only a fully
/// failed grid is an error.
pub fn run_grid(
    m: &DataMatrix,
    k_target: usize,
    algorithm: GridAlgorithm,
    spec: &GridSpec,
    metric: Option<MetricChoice>,
    truth: Option<&Partition>,
) -> Result<GridResult> {
    if metric.is_some() && k_target < 2 {
        return Err(Error::InvalidParameter(
            "silhouette selection needs k_target >= 2".into(),
        ));
    }
    if let Some(t) = truth {
        if t.len() != m.n_entities() {
            return Err(Error::DimensionMismatch(format!(
                "truth over {} entities for a matrix with {}",
                t.len(),
                m.n_entities()
            )));
        }
    }
    if spec.p_values.is_empty() {
        return Err(Error::EmptyInput("grid p values"));
    }

    // Fixed-metric dissimilarities are shared across all cells; the
    // Minkowski matrix depends on p and is built once per p row.
    let shared: Option<Arc<PairwiseDistances>> = match metric {
        Some(MetricChoice::SqEuclidean) => Some(Arc::new(PairwiseDistances::compute(
            m,
            SilhouetteMetric::SqEuclidean,
        )?)),
        Some(MetricChoice::Manhattan) => Some(Arc::new(PairwiseDistances::compute(
            m,
            SilhouetteMetric::Manhattan,
        )?)),
        _ => None,
    };

    let betas: Vec<Option<f64>> = match algorithm {
        GridAlgorithm::WardP => vec![None],
        GridAlgorithm::AWardPb => spec.beta_values.iter().copied().map(Some).collect(),
    };
    if betas.is_empty() {
        return Err(Error::EmptyInput("grid beta values"));
    }

    let rows: Vec<Vec<GridCell>> = spec
        .p_values
        .par_iter()
        .map(|&p| -> Result<Vec<GridCell>> {
            let row_matrix: Option<Arc<PairwiseDistances>> = match metric {
                Some(MetricChoice::Minkowski) => Some(Arc::new(PairwiseDistances::compute(
                    m,
                    SilhouetteMetric::Minkowski(p),
                )?)),
                _ => shared.clone(),
            };
            let mut row = Vec::with_capacity(betas.len());
            for &beta in &betas {
                let started = Instant::now();
                let outcome = run_cell(m, k_target, algorithm, p, beta);
                let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
                let cell = match outcome {
                    Ok(partition) => {
                        let silhouette = match &row_matrix {
                            Some(dists) => {
                                Some(silhouette_from_pairwise(dists, &partition)?)
                            }
                            None => None,
                        };
                        let ari_vs_truth = match truth {
                            Some(t) => Some(adjusted_rand(&partition, t)?),
                            None => None,
                        };
                        GridCell {
                            p,
                            beta,
                            silhouette,
                            ari_vs_truth,
                            runtime_ms,
                            partition: Some(partition),
                            error: None,
                        }
                    }
                    Err(e) => GridCell {
                        p,
                        beta,
                        silhouette: None,
                        ari_vs_truth: None,
                        runtime_ms,
                        partition: None,
                        error: Some(e.to_string()),
                    },
                };
                row.push(cell);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<GridCell> = rows.into_iter().flatten().collect();
    if cells.iter().all(|c| c.error.is_some()) {
        let first = cells
            .iter()
            .find_map(|c| c.error.clone())
            .unwrap_or_default();
        return Err(Error::GridExhausted(first));
    }
    Ok(GridResult { cells, metric })
}

/// Scores the partitions of an already-run grid under another Silhouette
/// metric, reusing one dissimilarity matrix per distinct exponent. Failed
/// cells score `None`.
pub fn silhouettes_for(
    m: &DataMatrix,
    result: &GridResult,
    metric: MetricChoice,
) -> Result<Vec<Option<f64>>> {
    match metric {
        MetricChoice::SqEuclidean | MetricChoice::Manhattan => {
            let dists = PairwiseDistances::compute(m, metric.resolve(f64::NAN))?;
            result
                .cells
                .iter()
                .map(|cell| {
                    cell.partition
                        .as_ref()
                        .map(|p| silhouette_from_pairwise(&dists, p))
                        .transpose()
                })
                .collect()
        }
        MetricChoice::Minkowski => {
            let mut ps: Vec<f64> = result.cells.iter().map(|c| c.p).collect();
            ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ps.dedup();
            let scored: Vec<Vec<(usize, f64)>> = ps
                .par_iter()
                .map(|&p| -> Result<Vec<(usize, f64)>> {
                    let dists =
                        PairwiseDistances::compute(m, SilhouetteMetric::Minkowski(p))?;
                    let mut out = Vec::new();
                    for (i, cell) in result.cells.iter().enumerate() {
                        if cell.p == p {
                            if let Some(part) = &cell.partition {
                                out.push((i, silhouette_from_pairwise(&dists, part)?));
                            }
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut values = vec![None; result.cells.len()];
            for (i, s) in scored.into_iter().flatten() {
                values[i] = Some(s);
            }
            Ok(values)
        }
    }
}

/// Silhouette-driven selection: every cell scored under the chosen metric,
/// the argmax reported. The `Minkowski` choice scores each cell with the
/// cell's own p.
pub fn grid_search(
    m: &DataMatrix,
    k_target: usize,
    algorithm: GridAlgorithm,
    metric: MetricChoice,
    spec: &GridSpec,
) -> Result<GridResult> {
    run_grid(m, k_target, algorithm, spec, Some(metric), None)
}

/// The "best possible" protocol: the same grid, scored as the maximum ARI
/// against the known truth over all cells.
pub fn best_ari_over_grid(
    m: &DataMatrix,
    truth: &Partition,
    k_target: usize,
    algorithm: GridAlgorithm,
    spec: &GridSpec,
) -> Result<GridResult> {
    run_grid(m, k_target, algorithm, spec, None, Some(truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (DataMatrix, Partition) {
        let mut rows = Vec::new();
        let offsets = [0.0f64, 0.13, -0.11, 0.07, -0.06];
        for &o in &offsets {
            rows.push(vec![0.0 + o, 0.5 - o]);
        }
        for &o in &offsets {
            rows.push(vec![8.0 + o, 7.5 - o]);
        }
        let truth = Partition::from_labels(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]).unwrap();
        (DataMatrix::from_rows(rows).unwrap(), truth)
    }

    #[test]
    fn single_cell_grid_best_is_that_cell() {
        let (m, truth) = blobs();
        let spec = GridSpec::single(2.0, 2.0).unwrap();
        let r = grid_search(&m, 2, GridAlgorithm::AWardPb, MetricChoice::Manhattan, &spec)
            .unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.best_by_silhouette(), Some(0));

        // best-ARI over a single cell is that cell's ARI
        let r = best_ari_over_grid(&m, &truth, 2, GridAlgorithm::AWardPb, &spec).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.best_ari_value(), r.cells[0].ari_vs_truth);
    }

    #[test]
    fn ward_p_grid_has_one_cell_per_p() {
        let (m, _) = blobs();
        let spec = GridSpec::with_step_tenths(13).unwrap(); // 1.1, 2.4, 3.7, 5.0
        let r = grid_search(&m, 2, GridAlgorithm::WardP, MetricChoice::SqEuclidean, &spec)
            .unwrap();
        assert_eq!(r.cells.len(), 4);
        assert!(r.cells.iter().all(|c| c.beta.is_none()));
    }

    #[test]
    fn full_lattice_has_forty_values() {
        let spec = GridSpec::full();
        assert_eq!(spec.p_values.len(), 40);
        assert!((spec.p_values[0] - 1.1).abs() < 1e-12);
        assert!((spec.p_values[39] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_prefers_truth_recovering_cell() {
        let (m, truth) = blobs();
        let spec = GridSpec::with_step_tenths(13).unwrap();
        let r = run_grid(
            &m,
            2,
            GridAlgorithm::AWardPb,
            &spec,
            Some(MetricChoice::Manhattan),
            Some(&truth),
        )
        .unwrap();
        let best = r.best_by_silhouette().unwrap();
        assert_eq!(r.cells[best].ari_vs_truth, Some(1.0));
    }

    #[test]
    fn best_ari_dominates_every_cell() {
        let (m, truth) = blobs();
        let spec = GridSpec::with_step_tenths(13).unwrap();
        let r = best_ari_over_grid(&m, &truth, 2, GridAlgorithm::AWardPb, &spec).unwrap();
        let best = r.best_ari_value().unwrap();
        for cell in &r.cells {
            if let Some(a) = cell.ari_vs_truth {
                assert!(best >= a);
            }
        }
        assert_eq!(best, 1.0);
    }

    #[test]
    fn grid_determinism_across_runs() {
        let (m, _) = blobs();
        let spec = GridSpec::with_step_tenths(20).unwrap();
        let a = grid_search(&m, 2, GridAlgorithm::AWardPb, MetricChoice::Manhattan, &spec)
            .unwrap();
        let b = grid_search(&m, 2, GridAlgorithm::AWardPb, MetricChoice::Manhattan, &spec)
            .unwrap();
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            assert_eq!(ca.silhouette, cb.silhouette);
            assert_eq!(
                ca.partition.as_ref().map(|p| p.labels().to_vec()),
                cb.partition.as_ref().map(|p| p.labels().to_vec())
            );
        }
    }
}
