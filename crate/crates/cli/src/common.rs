use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use minkward::io::{self, AppliedNoise, DatasetSidecar, LabelColumn};
use minkward::{
    add_noise_features, blur_cluster_fragments, derive_seed, generate_mixture, noise_suffix,
    substitute_entities, DataMatrix, MixtureConfig, NoiseSpec, Partition,
};

/// Default output directory: `--out`, then `MINKWARD_OUT`, then the current
/// directory.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("MINKWARD_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Seed list syntax: `20` (counts up from 0), `3..9` (half-open range) or an
/// explicit `1,5,9` list.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().context("range start")?;
        let hi: u64 = hi.trim().parse().context("range end")?;
        if hi <= lo {
            bail!("empty seed range {spec}");
        }
        return Ok((lo..hi).collect());
    }
    if spec.contains(',') {
        return spec
            .split(',')
            .map(|s| s.trim().parse().context("seed list entry"))
            .collect();
    }
    let count: u64 = spec.parse().context("seed count")?;
    if count == 0 {
        bail!("at least one seed is required");
    }
    Ok((0..count).collect())
}

/// `--label-col` accepts a 0-based index or a header name.
pub fn parse_label_col(spec: &str) -> LabelColumn {
    match spec.parse::<usize>() {
        Ok(i) => LabelColumn::Index(i),
        Err(_) => LabelColumn::Name(spec.to_string()),
    }
}

/// File-system-safe version of a configuration display name.
pub fn sanitize_name(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            ' ' => '_',
            '%' => 'p',
            '/' | '\\' | ':' => '-',
            c => c,
        })
        .collect()
}

/// A dataset ready for clustering: either generated (with sidecar metadata)
/// or loaded from CSV.
pub struct BuiltDataset {
    pub display_name: String,
    pub matrix: DataMatrix,
    pub truth: Option<Partition>,
    pub substituted: Vec<usize>,
    pub sidecar: Option<DatasetSidecar>,
}

/// Generates a mixture and applies the noise pipeline. Each noise operation
/// draws from its own derived sub-seed, so the base data is identical with
/// and without noise.
pub fn build_generated(
    entities: usize,
    features: usize,
    clusters: usize,
    noise: &[NoiseSpec],
    seed: u64,
) -> Result<BuiltDataset> {
    let cfg = MixtureConfig::benchmark(entities, features, clusters, seed);
    let base = generate_mixture(&cfg)?;
    let mut display_name = cfg.stem();
    let mut matrix = base.matrix;
    let mut substituted = Vec::new();
    let mut applied = Vec::new();
    let mut n_noise_features = 0usize;

    for (index, spec) in noise.iter().enumerate() {
        let op_seed = derive_seed(seed, index as u64 + 1);
        match spec {
            NoiseSpec::NoiseFeatures { count } => {
                matrix = add_noise_features(&matrix, *count, op_seed);
                n_noise_features += count;
            }
            NoiseSpec::ClusterBlur { fraction } => {
                matrix = blur_cluster_fragments(&matrix, &base.truth, *fraction, op_seed)?;
            }
            NoiseSpec::EntitySubstitution { fraction } => {
                let (noisy, mask) = substitute_entities(&matrix, *fraction, op_seed)?;
                matrix = noisy;
                substituted.extend(mask);
            }
        }
        display_name.push_str(&noise_suffix(spec));
        applied.push(AppliedNoise {
            spec: spec.clone(),
            seed: op_seed,
        });
    }
    substituted.sort_unstable();
    substituted.dedup();

    let sidecar = DatasetSidecar {
        name: display_name.clone(),
        seed,
        mixture: Some(cfg),
        noise: applied,
        truth_labels: Some(base.truth.labels().to_vec()),
        n_noise_features,
        substituted_entities: substituted.clone(),
    };
    Ok(BuiltDataset {
        display_name,
        matrix,
        truth: Some(base.truth),
        substituted,
        sidecar: Some(sidecar),
    })
}

/// Loads a dataset CSV, pulling ground truth from the designated label
/// column and substitution metadata from a sidecar found at `<stem>.json`.
pub fn build_from_csv(path: &Path, label: Option<&LabelColumn>) -> Result<BuiltDataset> {
    let loaded = io::read_dataset_csv(path, label)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut truth = loaded.truth;
    let mut substituted = Vec::new();
    let sidecar_path = path.with_extension("json");
    let mut sidecar = None;
    if sidecar_path.exists() {
        let sc = io::read_sidecar_json(&sidecar_path)
            .with_context(|| format!("reading {}", sidecar_path.display()))?;
        if truth.is_none() {
            if let Some(labels) = &sc.truth_labels {
                truth = Some(Partition::from_labels(labels)?);
            }
        }
        substituted = sc.substituted_entities.clone();
        sidecar = Some(sc);
    }
    let display_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Ok(BuiltDataset {
        display_name,
        matrix: loaded.matrix,
        truth,
        substituted,
        sidecar,
    })
}

/// ARI that honours the entity-substitution protocol: substituted rows are
/// left out of both partitions before scoring.
pub fn ari_excluding(
    found: &Partition,
    truth: &Partition,
    substituted: &[usize],
) -> Result<f64> {
    if substituted.is_empty() {
        return Ok(minkward::adjusted_rand(found, truth)?);
    }
    let excluded: std::collections::HashSet<usize> = substituted.iter().copied().collect();
    let keep: Vec<usize> = (0..found.len()).filter(|i| !excluded.contains(i)).collect();
    if keep.is_empty() {
        bail!("every entity was substituted; nothing to evaluate");
    }
    Ok(minkward::adjusted_rand(
        &found.restricted_to(&keep)?,
        &truth.restricted_to(&keep)?,
    )?)
}
