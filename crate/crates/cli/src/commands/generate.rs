use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use minkward::io::{write_dataset_csv, write_sidecar_json};
use minkward::{benchmark_table, NoiseSpec};

use crate::common::{build_generated, parse_seeds, resolve_out_dir, sanitize_name};

#[derive(Args)]
pub struct GenerateArgs {
    /// Built-in preset: `paper-table1` = the nine benchmark configurations.
    #[arg(long, conflicts_with_all = ["entities", "features", "clusters"])]
    preset: Option<String>,

    #[arg(long)]
    entities: Option<usize>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    clusters: Option<usize>,

    /// Append this many uniform noise features.
    #[arg(long)]
    noise_features: Option<usize>,
    /// Blur this fraction of the (cluster, feature) fragments.
    #[arg(long)]
    blur: Option<f64>,
    /// Substitute this fraction of whole entities by uniform noise.
    #[arg(long)]
    substitute: Option<f64>,

    /// Seed list: a count (`20`), a range (`3..9`) or a list (`1,5,9`).
    #[arg(long, default_value = "1")]
    seeds: String,

    #[arg(long)]
    out: Option<PathBuf>,
}

fn noise_from_flags(args: &GenerateArgs) -> Vec<NoiseSpec> {
    let mut noise = Vec::new();
    if let Some(count) = args.noise_features {
        noise.push(NoiseSpec::NoiseFeatures { count });
    }
    if let Some(fraction) = args.blur {
        noise.push(NoiseSpec::ClusterBlur { fraction });
    }
    if let Some(fraction) = args.substitute {
        noise.push(NoiseSpec::EntitySubstitution { fraction });
    }
    noise
}

pub fn run(args: GenerateArgs) -> Result<()> {
    let out = resolve_out_dir(args.out.as_deref());
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let seeds = parse_seeds(&args.seeds)?;

    let jobs: Vec<(usize, usize, usize, Vec<NoiseSpec>)> = match args.preset.as_deref() {
        Some("paper-table1") => benchmark_table()
            .into_iter()
            .map(|e| {
                (
                    e.n_entities,
                    e.n_features,
                    e.n_clusters,
                    e.noise.into_iter().collect(),
                )
            })
            .collect(),
        Some(other) => bail!("unknown preset {other:?} (available: paper-table1)"),
        None => {
            let (Some(n), Some(v), Some(k)) = (args.entities, args.features, args.clusters)
            else {
                bail!("either --preset or all of --entities/--features/--clusters are required");
            };
            vec![(n, v, k, noise_from_flags(&args))]
        }
    };

    let mut written = 0usize;
    for (n, v, k, noise) in &jobs {
        for &seed in &seeds {
            let built = build_generated(*n, *v, *k, noise, seed)?;
            let stem = format!("{}_seed{:03}", sanitize_name(&built.display_name), seed);
            write_dataset_csv(out.join(format!("{stem}.csv")), &built.matrix)?;
            write_sidecar_json(
                out.join(format!("{stem}.json")),
                built.sidecar.as_ref().expect("generated datasets carry sidecars"),
            )?;
            written += 1;
        }
    }
    println!(
        "wrote {written} dataset(s) ({} configuration(s) x {} seed(s)) to {}",
        jobs.len(),
        seeds.len(),
        out.display()
    );
    Ok(())
}
