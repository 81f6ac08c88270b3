use std::path::Path;

use anyhow::{bail, Context, Result};
use minkward::NoiseSpec;
use serde::{Deserialize, Serialize};

/// Declarative description of a benchmark run; a JSON file with this shape
/// can be passed to `minkward benchmark --config`, with flags overriding
/// individual fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub dataset: DatasetSpec,
    pub algorithms: Vec<Algorithm>,
    pub k_target: usize,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub theta: Option<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub standardize: bool,
    #[serde(default)]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSpec {
    Csv {
        csv: String,
        #[serde(default)]
        label_col: Option<String>,
        /// Entity-substitution fraction applied per seed.
        #[serde(default)]
        substitute: Option<f64>,
    },
    Mixture {
        entities: usize,
        features: usize,
        clusters: usize,
        #[serde(default)]
        noise: Vec<NoiseSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[value(name = "ward")]
    Ward,
    #[value(name = "a_ward")]
    AWard,
    #[value(name = "ward_p")]
    WardP,
    #[value(name = "a_ward_pb")]
    AWardPb,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ward => "ward",
            Algorithm::AWard => "a_ward",
            Algorithm::WardP => "ward_p",
            Algorithm::AWardPb => "a_ward_pb",
        }
    }

    pub fn takes_p(self) -> bool {
        matches!(self, Algorithm::WardP | Algorithm::AWardPb)
    }

    pub fn takes_beta(self) -> bool {
        matches!(self, Algorithm::AWardPb)
    }

    pub fn takes_theta(self) -> bool {
        matches!(self, Algorithm::AWard)
    }
}

/// Rejects parameter/algorithm combinations the algorithm cannot honour.
pub fn check_parameters(
    algorithm: Algorithm,
    p: Option<f64>,
    beta: Option<f64>,
    theta: Option<usize>,
) -> Result<()> {
    if p.is_some() && !algorithm.takes_p() {
        bail!("--p is not a parameter of {}", algorithm.name());
    }
    if beta.is_some() && !algorithm.takes_beta() {
        bail!("--beta is not a parameter of {}", algorithm.name());
    }
    if theta.is_some() && !algorithm.takes_theta() {
        bail!("--theta is not a parameter of {}", algorithm.name());
    }
    if algorithm.takes_p() && p.is_none() {
        bail!("{} requires --p", algorithm.name());
    }
    if algorithm.takes_beta() && beta.is_none() {
        bail!("{} requires --beta", algorithm.name());
    }
    Ok(())
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
