//! The entity-by-feature data table and range standardisation.

use crate::error::{Error, Result};

/// An `N x V` table of finite real values. Rows are entities, columns are
/// features. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>, // row-major
    n_entities: usize,
    n_features: usize,
    feature_names: Option<Vec<String>>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Rejects empty shapes, ragged
    /// input and non-finite entries.
    pub fn new(values: Vec<f64>, n_entities: usize, n_features: usize) -> Result<Self> {
        if n_entities == 0 || n_features == 0 {
            return Err(Error::EmptyInput("data matrix must have N >= 1 and V >= 1"));
        }
        if values.len() != n_entities * n_features {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for a {}x{} matrix, got {}",
                n_entities * n_features,
                n_entities,
                n_features,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NotFinite(format!(
                "entry ({}, {}) is {}",
                pos / n_features,
                pos % n_features,
                values[pos]
            )));
        }
        Ok(Self {
            values,
            n_entities,
            n_features,
            feature_names: None,
        })
    }

    /// Builds a matrix from one `Vec` per entity.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_entities = rows.len();
        if n_entities == 0 {
            return Err(Error::EmptyInput("no rows"));
        }
        let n_features = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    n_features
                )));
            }
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        Self::new(values, n_entities, n_features)
    }

    /// Attaches feature names; must match the feature count.
    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(Error::DimensionMismatch(format!(
                "{} feature names for {} features",
                names.len(),
                self.n_features
            )));
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn get(&self, i: usize, v: usize) -> f64 {
        self.values[i * self.n_features + v]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_features)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest and largest entry over the whole table (the "range of the
    /// data set" used by the uniform noise generators).
    pub fn global_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }

    /// Component-wise mean over all entities.
    pub fn grand_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.n_features];
        for row in self.rows() {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        let n = self.n_entities as f64;
        for m in &mut mean {
            *m /= n;
        }
        mean
    }
}

/// A feature removed by [`standardize_range`] because it had zero range.
#[derive(Debug, Clone, PartialEq)]
pub struct DroppedFeature {
    pub index: usize,
    pub name: Option<String>,
}

/// Result of range standardisation: the rescaled matrix plus the constant
/// features that were dropped.
#[derive(Debug, Clone)]
pub struct Standardized {
    pub matrix: DataMatrix,
    pub dropped: Vec<DroppedFeature>,
}

/// Rescales every feature to `(y - mean) / (max - min)`. Constant features
/// carry no cluster information, so they are dropped and reported instead of
/// being zero-filled.
pub fn standardize_range(m: &DataMatrix) -> Result<Standardized> {
    let n = m.n_entities() as f64;
    let v_in = m.n_features();

    let mut mean = vec![0.0; v_in];
    let mut min = vec![f64::INFINITY; v_in];
    let mut max = vec![f64::NEG_INFINITY; v_in];
    for row in m.rows() {
        for v in 0..v_in {
            let x = row[v];
            mean[v] += x;
            if x < min[v] {
                min[v] = x;
            }
            if x > max[v] {
                max[v] = x;
            }
        }
    }
    for mu in &mut mean {
        *mu /= n;
    }

    let kept: Vec<usize> = (0..v_in).filter(|&v| max[v] > min[v]).collect();
    if kept.is_empty() {
        return Err(Error::NoInformativeFeatures);
    }
    let dropped = (0..v_in)
        .filter(|v| !kept.contains(v))
        .map(|v| DroppedFeature {
            index: v,
            name: m.feature_names().map(|names| names[v].clone()),
        })
        .collect();

    let mut values = Vec::with_capacity(m.n_entities() * kept.len());
    for row in m.rows() {
        for &v in &kept {
            values.push((row[v] - mean[v]) / (max[v] - min[v]));
        }
    }
    let mut out = DataMatrix::new(values, m.n_entities(), kept.len())?;
    if let Some(names) = m.feature_names() {
        out = out.with_feature_names(kept.iter().map(|&v| names[v].clone()).collect())?;
    }
    Ok(Standardized {
        matrix: out,
        dropped,
    })
}
