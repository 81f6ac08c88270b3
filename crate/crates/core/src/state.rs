//! The (S, C, W) triple threaded through the weighted algorithms.

use crate::error::{Error, Result};
use crate::partition::Partition;

/// A partition together with per-cluster centroids and feature weights, plus
/// the exponents the weights were computed under.
#[derive(Debug, Clone)]
pub struct ClusterState {
    pub partition: Partition,
    pub centroids: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
    pub p: f64,
    pub beta: f64,
}

impl ClusterState {
    pub fn new(
        partition: Partition,
        centroids: Vec<Vec<f64>>,
        weights: Vec<Vec<f64>>,
        p: f64,
        beta: f64,
    ) -> Result<Self> {
        let k = partition.k();
        if centroids.len() != k || weights.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} centroids / {} weight rows for {} clusters",
                centroids.len(),
                weights.len(),
                k
            )));
        }
        if !(p > 1.0) || !(beta > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "exponents must exceed 1, got p = {p}, beta = {beta}"
            )));
        }
        for (kk, row) in weights.iter().enumerate() {
            if row.iter().any(|&w| w < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "negative weight in cluster {kk}"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "weights of cluster {kk} sum to {sum}"
                )));
            }
        }
        Ok(Self {
            partition,
            centroids,
            weights,
            p,
            beta,
        })
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }
}
