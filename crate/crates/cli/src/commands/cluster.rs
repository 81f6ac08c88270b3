use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use minkward::io::{to_newick, write_linkage_csv, write_newick, write_partition_csv};
use minkward::{
    a_ward, a_ward_mini_trees, a_ward_pb, standardize_range, ward, ward_p, Dendrogram,
    Partition,
};
use serde::Serialize;

use crate::common::{build_from_csv, parse_label_col, resolve_out_dir};
use crate::config::{check_parameters, Algorithm};

#[derive(Args)]
pub struct ClusterArgs {
    /// Dataset CSV (optional header row; see also --label-col).
    #[arg(long)]
    data: PathBuf,

    /// Ground-truth column to split off, by 0-based index or header name.
    #[arg(long)]
    label_col: Option<String>,

    #[arg(long, value_enum)]
    algorithm: Algorithm,

    /// Number of clusters to cut the dendrogram at.
    #[arg(long)]
    k: usize,

    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Minimum anomalous-cluster size for the a_ward initialisation.
    #[arg(long)]
    theta: Option<usize>,

    /// Apply range standardisation before clustering.
    #[arg(long)]
    standardize: bool,

    /// Also export per-leaf mini-trees (a_ward only).
    #[arg(long)]
    mini_trees: bool,

    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct TimingReport {
    algorithm: &'static str,
    n_entities: usize,
    n_features: usize,
    k_target: usize,
    p: Option<f64>,
    beta: Option<f64>,
    k_star: Option<usize>,
    init_ms: f64,
    agglomeration_ms: f64,
    total_ms: f64,
    cost_inversions: Vec<usize>,
    dropped_features: Vec<usize>,
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn run(args: ClusterArgs) -> Result<()> {
    check_parameters(args.algorithm, args.p, args.beta, args.theta)?;
    let out = resolve_out_dir(args.out.as_deref());
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let label = args.label_col.as_deref().map(parse_label_col);
    let built = build_from_csv(&args.data, label.as_ref())?;

    let mut matrix = built.matrix;
    let mut dropped_features = Vec::new();
    if args.standardize {
        let s = standardize_range(&matrix)?;
        for d in &s.dropped {
            match &d.name {
                Some(name) => eprintln!("dropped constant feature {} ({name})", d.index),
                None => eprintln!("dropped constant feature {}", d.index),
            }
        }
        dropped_features = s.dropped.iter().map(|d| d.index).collect();
        matrix = s.matrix;
    }

    let started = Instant::now();
    let (dendrogram, partition, k_star, init_ms, leaves): (
        Dendrogram,
        Partition,
        Option<usize>,
        f64,
        Option<Partition>,
    ) = match args.algorithm {
        Algorithm::Ward => {
            let d = ward(&matrix, args.k)?;
            let p = d.cut(args.k)?;
            (d, p, None, 0.0, None)
        }
        Algorithm::WardP => {
            let d = ward_p(&matrix, args.p.expect("validated"), args.k)?;
            let p = d.cut(args.k)?;
            (d, p, None, 0.0, None)
        }
        Algorithm::AWard => {
            let r = a_ward(&matrix, args.k, args.theta.unwrap_or(1))?;
            let p = r.entity_partition(args.k)?;
            if args.mini_trees {
                let trees = a_ward_mini_trees(&matrix, &r)?;
                let mut text = String::new();
                for (members, tree) in &trees {
                    let names: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                    text.push_str(&to_newick(tree, Some(&names))?);
                    text.push('\n');
                }
                std::fs::write(out.join("mini_trees.newick"), text)?;
            }
            (
                r.dendrogram.clone(),
                p,
                Some(r.k_star()),
                ms(r.init_time),
                Some(r.leaf_partition.clone()),
            )
        }
        Algorithm::AWardPb => {
            let r = a_ward_pb(
                &matrix,
                args.p.expect("validated"),
                args.beta.expect("validated"),
                args.k,
            )?;
            let p = r.entity_partition(args.k)?;
            (
                r.dendrogram.clone(),
                p,
                Some(r.k_star),
                ms(r.init_time),
                Some(r.leaf_state.partition.clone()),
            )
        }
    };
    let total_ms = ms(started.elapsed());

    write_partition_csv(out.join("partition.csv"), &partition)?;
    write_linkage_csv(out.join("linkage.csv"), &dendrogram)?;
    write_newick(out.join("dendrogram.newick"), &dendrogram, None)?;
    if let Some(leaf_partition) = &leaves {
        write_partition_csv(out.join("leaves.csv"), leaf_partition)?;
    }

    let inversions = dendrogram.cost_inversions();
    if !inversions.is_empty() {
        eprintln!(
            "note: {} merge cost inversion(s) at merge indices {:?}",
            inversions.len(),
            inversions
        );
    }
    let timing = TimingReport {
        algorithm: args.algorithm.name(),
        n_entities: matrix.n_entities(),
        n_features: matrix.n_features(),
        k_target: args.k,
        p: args.p,
        beta: args.beta,
        k_star,
        init_ms,
        agglomeration_ms: total_ms - init_ms,
        total_ms,
        cost_inversions: inversions,
        dropped_features,
    };
    std::fs::write(
        out.join("timing.json"),
        serde_json::to_string_pretty(&timing)?,
    )?;

    println!(
        "{} on {} ({} entities, {} features) -> {} clusters in {:.1} ms; outputs in {}",
        args.algorithm.name(),
        built.display_name,
        matrix.n_entities(),
        matrix.n_features(),
        partition.k(),
        total_ms,
        out.display()
    );
    Ok(())
}
