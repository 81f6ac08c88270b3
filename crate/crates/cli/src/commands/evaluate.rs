use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use minkward::io::{parse_linkage_csv_sized, read_partition_csv};
use minkward::{adjusted_rand, silhouette, Partition, SilhouetteMetric};

use crate::commands::grid::MetricArg;
use crate::common::{ari_excluding, build_from_csv, parse_label_col};

#[derive(Args)]
pub struct EvaluateArgs {
    /// Dataset CSV the partition refers to.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    label_col: Option<String>,

    /// Partition to score (entity_id,cluster CSV).
    #[arg(long, required_unless_present = "linkage")]
    partition: Option<PathBuf>,

    /// Alternatively, reload a linkage matrix and cut it at --k.
    #[arg(long, requires = "k")]
    linkage: Option<PathBuf>,
    /// Leaf membership CSV for linkage files produced by the a_ variants.
    #[arg(long)]
    leaves: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,

    /// Reference partition CSV to compare against (defaults to the label
    /// column or the sidecar ground truth).
    #[arg(long)]
    truth: Option<PathBuf>,

    /// Exclude entities recorded as substituted in the dataset sidecar.
    #[arg(long)]
    exclude_substituted: bool,

    /// Silhouette metrics to report.
    #[arg(long, value_delimiter = ',')]
    metric: Vec<MetricArg>,
    /// Exponent for the minkowski silhouette metric.
    #[arg(long)]
    minkowski_p: Option<f64>,
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let label = args.label_col.as_deref().map(parse_label_col);
    let built = build_from_csv(&args.data, label.as_ref())?;

    let found: Partition = if let Some(path) = &args.partition {
        read_partition_csv(path).with_context(|| format!("reading {}", path.display()))?
    } else {
        let path = args.linkage.as_ref().expect("clap enforces");
        let k = args.k.expect("clap enforces");
        let leaves = match &args.leaves {
            Some(p) => {
                read_partition_csv(p).with_context(|| format!("reading {}", p.display()))?
            }
            None => Partition::from_labels(&(0..built.matrix.n_entities()).collect::<Vec<_>>())?,
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let dendrogram = parse_linkage_csv_sized(&text, &leaves.cluster_sizes())
            .with_context(|| format!("parsing {}", path.display()))?;
        let cut = dendrogram.cut(k)?;
        let labels: Vec<usize> = leaves.labels().iter().map(|&l| cut.label(l)).collect();
        Partition::from_labels(&labels)?
    };
    if found.len() != built.matrix.n_entities() {
        bail!(
            "partition covers {} entities but the dataset has {}",
            found.len(),
            built.matrix.n_entities()
        );
    }

    let truth = match &args.truth {
        Some(path) => Some(
            read_partition_csv(path).with_context(|| format!("reading {}", path.display()))?,
        ),
        None => built.truth.clone(),
    };
    println!("clusters: {}", found.k());
    if let Some(truth) = &truth {
        let ari = if args.exclude_substituted {
            ari_excluding(&found, truth, &built.substituted)?
        } else {
            adjusted_rand(&found, truth)?
        };
        println!("ari: {ari}");
    }
    for &metric in &args.metric {
        let resolved = match metric {
            MetricArg::SqEuclidean => SilhouetteMetric::SqEuclidean,
            MetricArg::Manhattan => SilhouetteMetric::Manhattan,
            MetricArg::Minkowski => match args.minkowski_p {
                Some(p) => SilhouetteMetric::Minkowski(p),
                None => bail!("--minkowski-p is required with the minkowski metric"),
            },
        };
        let s = silhouette(&built.matrix, &found, resolved)?;
        let name = match metric {
            MetricArg::SqEuclidean => "sq_euclidean",
            MetricArg::Manhattan => "manhattan",
            MetricArg::Minkowski => "minkowski",
        };
        println!("silhouette_{name}: {s}");
    }
    Ok(())
}
