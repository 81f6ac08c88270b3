use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use minkward::io::write_grid_csv;
use minkward::{
    run_grid, silhouettes_for, GridAlgorithm, GridSpec, MetricChoice, NoiseSpec,
};

use crate::common::{build_from_csv, build_generated, parse_label_col, resolve_out_dir};
use crate::config::Algorithm;

#[derive(Args)]
pub struct GridArgs {
    /// Dataset CSV; alternatively generate one with the mixture flags below.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_col: Option<String>,

    #[arg(long)]
    entities: Option<usize>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    noise_features: Option<usize>,
    #[arg(long)]
    blur: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// ward_p spans p only; a_ward_pb spans the full p x beta lattice.
    #[arg(long, value_enum)]
    algorithm: Algorithm,

    #[arg(long)]
    k: usize,

    /// Lattice stride in tenths: 1 = the full 1.1,1.2,...,5.0 grid.
    #[arg(long, default_value_t = 1)]
    step_tenths: usize,

    /// Silhouette metrics to select by, e.g. `manhattan,sq_euclidean,minkowski`.
    #[arg(long, value_delimiter = ',', default_value = "manhattan")]
    metric: Vec<MetricArg>,

    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MetricArg {
    #[value(name = "sq_euclidean")]
    SqEuclidean,
    #[value(name = "manhattan")]
    Manhattan,
    #[value(name = "minkowski")]
    Minkowski,
}

impl From<MetricArg> for MetricChoice {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::SqEuclidean => MetricChoice::SqEuclidean,
            MetricArg::Manhattan => MetricChoice::Manhattan,
            MetricArg::Minkowski => MetricChoice::Minkowski,
        }
    }
}

pub fn run(args: GridArgs) -> Result<()> {
    let algorithm = match args.algorithm {
        Algorithm::WardP => GridAlgorithm::WardP,
        Algorithm::AWardPb => GridAlgorithm::AWardPb,
        other => bail!(
            "{} has no exponents to search; use ward_p or a_ward_pb",
            other.name()
        ),
    };
    let out = resolve_out_dir(args.out.as_deref());
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let built = match (&args.data, args.entities, args.features, args.clusters) {
        (Some(path), ..) => {
            let label = args.label_col.as_deref().map(parse_label_col);
            build_from_csv(path, label.as_ref())?
        }
        (None, Some(n), Some(v), Some(k)) => {
            let mut noise = Vec::new();
            if let Some(c) = args.noise_features {
                noise.push(NoiseSpec::NoiseFeatures { count: c });
            }
            if let Some(f) = args.blur {
                noise.push(NoiseSpec::ClusterBlur { fraction: f });
            }
            build_generated(n, v, k, &noise, args.seed)?
        }
        _ => bail!("provide --data or all of --entities/--features/--clusters"),
    };

    let spec = GridSpec::with_step_tenths(args.step_tenths)?;
    let result = run_grid(
        &built.matrix,
        args.k,
        algorithm,
        &spec,
        None,
        built.truth.as_ref(),
    )?;

    let mut chosen = String::from("metric,p,beta,silhouette,ari_vs_truth\n");
    for &metric_arg in &args.metric {
        let metric: MetricChoice = metric_arg.into();
        let scores = silhouettes_for(&built.matrix, &result, metric)?;
        let mut scored = result.clone();
        for (cell, s) in scored.cells.iter_mut().zip(&scores) {
            cell.silhouette = *s;
        }
        scored.metric = Some(metric);
        write_grid_csv(out.join(format!("grid_{}.csv", metric.name())), &scored)?;
        match scored.best_by_silhouette() {
            Some(i) => {
                let cell = &scored.cells[i];
                let _ = writeln!(
                    chosen,
                    "{},{},{},{},{}",
                    metric.name(),
                    cell.p,
                    cell.beta.map(|b| b.to_string()).unwrap_or_default(),
                    cell.silhouette.map(|s| s.to_string()).unwrap_or_default(),
                    cell.ari_vs_truth
                        .map(|a| a.to_string())
                        .unwrap_or_default()
                );
            }
            None => {
                let _ = writeln!(chosen, "{},,,,", metric.name());
            }
        }
    }
    if built.truth.is_some() {
        if let Some(i) = result.best_by_ari() {
            let cell = &result.cells[i];
            let _ = writeln!(
                chosen,
                "best_ari,{},{},,{}",
                cell.p,
                cell.beta.map(|b| b.to_string()).unwrap_or_default(),
                cell.ari_vs_truth.map(|a| a.to_string()).unwrap_or_default()
            );
        }
    }
    std::fs::write(out.join("chosen.csv"), &chosen)?;

    let evaluated = result.cells.iter().filter(|c| c.error.is_none()).count();
    let failed = result.cells.len() - evaluated;
    println!(
        "grid over {} cell(s) on {} ({} ok, {} failed); outputs in {}",
        result.cells.len(),
        built.display_name,
        evaluated,
        failed,
        out.display()
    );
    Ok(())
}
