/*!
Ward-family agglomerative clustering with Minkowski feature weighting.

This crate implements four related hierarchical clustering algorithms over an
entity-by-feature table:

* [`ward`] — classical Ward agglomeration from
  singletons, maintained with Lance–Williams updates;
* [`a_ward`] — Ward started from the
  anomalous-pattern partition found by intelligent k-means
  ([`ik_means`]), which trades a cheap partitional
  initialisation for most of the quadratic merging work;
* [`ward_p`] — Ward under the p-th power of the
  weighted Minkowski distance with cluster-specific feature weights;
* [`a_ward_pb`] — the two-exponent variant: the
  feature-weight exponent is decoupled from the distance exponent, and the
  merge process starts from the weighted anomalous-pattern partition refined
  by [`imwk_means_pb`].

Feature weights are cluster specific and inversely related to the
within-cluster dispersion of each feature, which is what lets the weighted
variants shrug off noise features and blurred cluster fragments.

Around the algorithms sit the pieces needed to benchmark them: a seeded
spherical Gaussian mixture generator with three noise mechanisms
([`datagen`]), the Adjusted Rand Index and Silhouette width ([`evaluation`]),
an exponent grid search ([`grid`]), and plain-text formats for datasets,
partitions and dendrograms ([`io`]).
*/

pub mod agglomerative;
pub mod datagen;
pub mod dendrogram;
mod error;
pub mod evaluation;
pub mod grid;
pub mod io;
pub mod matrix;
pub mod minkowski;
pub mod partition;
pub mod partitional;
pub mod state;

pub use agglomerative::{
    a_ward, a_ward_mini_trees, a_ward_pb, ward, ward_cost, ward_from_leaves, ward_p,
    ward_p_cost, ward_pb_cost, AWardPbResult, AWardResult,
};
pub use datagen::{
    add_noise_features, benchmark_table, blur_cluster_fragments, derive_seed, generate_mixture,
    noise_suffix, substitute_entities, BenchmarkEntry, GeneratedDataset, MixtureConfig,
    NoiseSpec,
};
pub use dendrogram::{Dendrogram, Merge};
pub use error::{Error, Result};
pub use evaluation::{
    adjusted_rand, contingency, silhouette, silhouette_from_pairwise, ContingencyTable,
    PairwiseDistances, SilhouetteMetric,
};
pub use grid::{
    best_ari_over_grid, grid_search, run_grid, silhouettes_for, GridAlgorithm, GridCell,
    GridResult, GridSpec, MetricChoice,
};
pub use matrix::{standardize_range, DataMatrix, DroppedFeature, Standardized};
pub use minkowski::{
    dispersions, minkowski_center, minkowski_power_distance, update_weights,
    weighted_distance_pb, Dispersions,
};
pub use partition::Partition;
pub use partitional::{
    anomalous_init_pb, ik_means, imwk_means_pb, kmeans, AnomalousInit, IkMeansResult,
    ImwkResult, KMeansResult, MAX_ITERATIONS,
};
pub use state::ClusterState;
