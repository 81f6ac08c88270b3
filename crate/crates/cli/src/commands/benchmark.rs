use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;
use minkward::{a_ward, a_ward_pb, derive_seed, substitute_entities, ward, ward_p, Partition};
use rayon::prelude::*;

use crate::common::{
    ari_excluding, build_from_csv, build_generated, parse_label_col, parse_seeds,
    resolve_out_dir, sanitize_name, BuiltDataset,
};
use crate::config::{check_parameters, load_config, Algorithm, DatasetSpec, ExperimentConfig};

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Experiment description (JSON); flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

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
    /// Entity-substitution protocol: substituted rows are excluded from ARI.
    #[arg(long)]
    substitute: Option<f64>,

    /// Algorithms to run, e.g. `ward,a_ward`.
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<Algorithm>,

    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    theta: Option<usize>,

    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment name used for the output subdirectory.
    #[arg(long)]
    name: Option<String>,
}

struct AlgoOutcome {
    ari: Option<f64>,
    k_star: Option<usize>,
    init_ms: f64,
    merge_ms: f64,
    total_ms: f64,
    partition: Partition,
}

struct SeedRow {
    seed: u64,
    outcomes: Vec<Result<AlgoOutcome, String>>,
    pairwise: Vec<Option<f64>>,
}

fn merge_config(args: BenchmarkArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => {
            let dataset = if let Some(csv) = &args.data {
                DatasetSpec::Csv {
                    csv: csv.display().to_string(),
                    label_col: args.label_col.clone(),
                    substitute: None,
                }
            } else if let (Some(n), Some(v), Some(k)) =
                (args.entities, args.features, args.clusters)
            {
                let mut noise = Vec::new();
                if let Some(c) = args.noise_features {
                    noise.push(minkward::NoiseSpec::NoiseFeatures { count: c });
                }
                if let Some(f) = args.blur {
                    noise.push(minkward::NoiseSpec::ClusterBlur { fraction: f });
                }
                DatasetSpec::Mixture {
                    entities: n,
                    features: v,
                    clusters: k,
                    noise,
                }
            } else {
                bail!(
                    "provide --config, --data, or --entities/--features/--clusters"
                );
            };
            ExperimentConfig {
                name: None,
                dataset,
                algorithms: Vec::new(),
                k_target: 0,
                p: None,
                beta: None,
                theta: None,
                seeds: Vec::new(),
                standardize: false,
                out_dir: None,
            }
        }
    };

    if !args.algorithms.is_empty() {
        cfg.algorithms = args.algorithms.clone();
    }
    if let Some(k) = args.k {
        cfg.k_target = k;
    }
    if args.p.is_some() {
        cfg.p = args.p;
    }
    if args.beta.is_some() {
        cfg.beta = args.beta;
    }
    if args.theta.is_some() {
        cfg.theta = args.theta;
    }
    if let Some(seeds) = &args.seeds {
        cfg.seeds = parse_seeds(seeds)?;
    }
    if args.standardize {
        cfg.standardize = true;
    }
    if let Some(name) = &args.name {
        cfg.name = Some(name.clone());
    }
    if let Some(f) = args.substitute {
        if let DatasetSpec::Csv { substitute, .. } = &mut cfg.dataset {
            *substitute = Some(f);
        } else if let DatasetSpec::Mixture { noise, .. } = &mut cfg.dataset {
            noise.push(minkward::NoiseSpec::EntitySubstitution { fraction: f });
        }
    }

    if cfg.algorithms.is_empty() {
        bail!("no algorithms requested");
    }
    if cfg.k_target == 0 {
        bail!("--k (or k_target in the config) is required");
    }
    if cfg.seeds.is_empty() {
        cfg.seeds = vec![0];
    }
    for &a in &cfg.algorithms {
        let p = cfg.p.filter(|_| a.takes_p());
        let beta = cfg.beta.filter(|_| a.takes_beta());
        let theta = cfg.theta.filter(|_| a.takes_theta());
        check_parameters(a, p, beta, theta)?;
    }

    let out = match &cfg.out_dir {
        Some(dir) if args.out.is_none() => PathBuf::from(dir),
        _ => resolve_out_dir(args.out.as_deref()),
    };
    Ok((cfg, out))
}

fn build_seed_dataset(cfg: &ExperimentConfig, seed: u64) -> Result<BuiltDataset> {
    match &cfg.dataset {
        DatasetSpec::Mixture {
            entities,
            features,
            clusters,
            noise,
        } => build_generated(*entities, *features, *clusters, noise, seed),
        DatasetSpec::Csv {
            csv,
            label_col,
            substitute,
        } => {
            let label = label_col.as_deref().map(parse_label_col);
            let mut built = build_from_csv(PathBuf::from(csv).as_path(), label.as_ref())?;
            if let Some(fraction) = substitute {
                let (noisy, mask) =
                    substitute_entities(&built.matrix, *fraction, derive_seed(seed, 1))?;
                built.matrix = noisy;
                built.substituted = mask;
            }
            Ok(built)
        }
    }
}

fn run_one(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    built: &BuiltDataset,
) -> Result<AlgoOutcome, String> {
    let k = cfg.k_target;
    let started = Instant::now();
    let (partition, k_star, init_ms) = match algorithm {
        Algorithm::Ward => {
            let d = ward(&built.matrix, k).map_err(|e| e.to_string())?;
            (d.cut(k).map_err(|e| e.to_string())?, None, 0.0)
        }
        Algorithm::WardP => {
            let d = ward_p(&built.matrix, cfg.p.expect("validated"), k)
                .map_err(|e| e.to_string())?;
            (d.cut(k).map_err(|e| e.to_string())?, None, 0.0)
        }
        Algorithm::AWard => {
            let r = a_ward(&built.matrix, k, cfg.theta.unwrap_or(1))
                .map_err(|e| e.to_string())?;
            (
                r.entity_partition(k).map_err(|e| e.to_string())?,
                Some(r.k_star()),
                r.init_time.as_secs_f64() * 1e3,
            )
        }
        Algorithm::AWardPb => {
            let r = a_ward_pb(
                &built.matrix,
                cfg.p.expect("validated"),
                cfg.beta.expect("validated"),
                k,
            )
            .map_err(|e| e.to_string())?;
            (
                r.entity_partition(k).map_err(|e| e.to_string())?,
                Some(r.k_star),
                r.init_time.as_secs_f64() * 1e3,
            )
        }
    };
    let total_ms = started.elapsed().as_secs_f64() * 1e3;
    let ari = match &built.truth {
        Some(truth) => Some(
            ari_excluding(&partition, truth, &built.substituted).map_err(|e| e.to_string())?,
        ),
        None => None,
    };
    Ok(AlgoOutcome {
        ari,
        k_star,
        init_ms,
        merge_ms: total_ms - init_ms,
        total_ms,
        partition,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run(args: BenchmarkArgs) -> Result<()> {
    let (cfg, out_root) = merge_config(args)?;
    let name = cfg.name.clone().unwrap_or_else(|| "benchmark".to_string());
    let out = out_root.join(sanitize_name(&name));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let rows: Vec<SeedRow> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let built = match build_seed_dataset(&cfg, seed) {
                Ok(b) => b,
                Err(e) => {
                    let failed = vec![Err(e.to_string())];
                    return SeedRow {
                        seed,
                        outcomes: failed
                            .into_iter()
                            .chain(cfg.algorithms.iter().skip(1).map(|_| {
                                Err("dataset generation failed".to_string())
                            }))
                            .collect(),
                        pairwise: vec![None; n_pairs(cfg.algorithms.len())],
                    };
                }
            };
            let mut built = built;
            if cfg.standardize {
                match minkward::standardize_range(&built.matrix) {
                    Ok(s) => built.matrix = s.matrix,
                    Err(e) => {
                        return SeedRow {
                            seed,
                            outcomes: cfg
                                .algorithms
                                .iter()
                                .map(|_| Err(e.to_string()))
                                .collect(),
                            pairwise: vec![None; n_pairs(cfg.algorithms.len())],
                        }
                    }
                }
            }
            let outcomes: Vec<Result<AlgoOutcome, String>> = cfg
                .algorithms
                .iter()
                .map(|&a| run_one(&cfg, a, &built))
                .collect();
            let mut pairwise = Vec::new();
            for i in 0..outcomes.len() {
                for j in (i + 1)..outcomes.len() {
                    let value = match (&outcomes[i], &outcomes[j]) {
                        (Ok(a), Ok(b)) => {
                            ari_excluding(&a.partition, &b.partition, &built.substituted).ok()
                        }
                        _ => None,
                    };
                    pairwise.push(value);
                }
            }
            SeedRow {
                seed,
                outcomes,
                pairwise,
            }
        })
        .collect();

    // column layout
    let mut header = String::from("seed,p,beta");
    for &a in &cfg.algorithms {
        let n = a.name();
        let _ = write!(
            header,
            ",{n}_ari,{n}_k_star,{n}_init_ms,{n}_agglomeration_ms,{n}_total_ms"
        );
    }
    for i in 0..cfg.algorithms.len() {
        for j in (i + 1)..cfg.algorithms.len() {
            let _ = write!(
                header,
                ",ari_{}_vs_{}",
                cfg.algorithms[i].name(),
                cfg.algorithms[j].name()
            );
        }
    }
    header.push_str(",error\n");

    let mut report = header.clone();
    let mut failures = 0usize;
    for row in &rows {
        let _ = write!(
            report,
            "{},{},{}",
            row.seed,
            fmt_opt(cfg.p),
            fmt_opt(cfg.beta)
        );
        let mut row_errors: Vec<String> = Vec::new();
        for outcome in &row.outcomes {
            match outcome {
                Ok(o) => {
                    let _ = write!(
                        report,
                        ",{},{},{},{},{}",
                        fmt_opt(o.ari),
                        o.k_star.map(|k| k.to_string()).unwrap_or_default(),
                        o.init_ms,
                        o.merge_ms,
                        o.total_ms
                    );
                }
                Err(e) => {
                    let _ = write!(report, ",,,,,");
                    row_errors.push(e.clone());
                }
            }
        }
        for pw in &row.pairwise {
            let _ = write!(report, ",{}", fmt_opt(*pw));
        }
        if row_errors.is_empty() {
            report.push_str(",\n");
        } else {
            failures += 1;
            let _ = writeln!(report, ",{}", row_errors.join("; ").replace(',', ";"));
        }
    }
    std::fs::write(out.join("report.csv"), &report)?;

    // aggregate over successful rows, column by column
    let mut aggregate = String::from("column,mean,sd,n\n");
    let mut add_stat = |label: String, values: Vec<f64>| {
        if values.is_empty() {
            return;
        }
        let (mean, sd) = mean_sd(&values);
        let _ = writeln!(aggregate, "{label},{mean},{sd},{}", values.len());
    };
    for (ai, &a) in cfg.algorithms.iter().enumerate() {
        let n = a.name();
        let ok_rows = || rows.iter().filter_map(move |r| r.outcomes[ai].as_ref().ok());
        add_stat(
            format!("{n}_ari"),
            ok_rows().filter_map(|o| o.ari).collect(),
        );
        add_stat(
            format!("{n}_k_star"),
            ok_rows().filter_map(|o| o.k_star.map(|k| k as f64)).collect(),
        );
        add_stat(
            format!("{n}_init_ms"),
            ok_rows().map(|o| o.init_ms).collect(),
        );
        add_stat(
            format!("{n}_agglomeration_ms"),
            ok_rows().map(|o| o.merge_ms).collect(),
        );
        add_stat(
            format!("{n}_total_ms"),
            ok_rows().map(|o| o.total_ms).collect(),
        );
    }
    let mut pair_index = 0usize;
    for i in 0..cfg.algorithms.len() {
        for j in (i + 1)..cfg.algorithms.len() {
            let values: Vec<f64> = rows
                .iter()
                .filter_map(|r| r.pairwise[pair_index])
                .collect();
            add_stat(
                format!(
                    "ari_{}_vs_{}",
                    cfg.algorithms[i].name(),
                    cfg.algorithms[j].name()
                ),
                values,
            );
            pair_index += 1;
        }
    }
    std::fs::write(out.join("aggregate.csv"), &aggregate)?;
    std::fs::write(
        out.join("config.json"),
        serde_json::to_string_pretty(&cfg)?,
    )?;

    println!(
        "benchmark {name}: {} seed(s), {} algorithm(s); reports in {}",
        cfg.seeds.len(),
        cfg.algorithms.len(),
        out.display()
    );
    if failures > 0 {
        bail!("{failures} seed(s) recorded failures (see report.csv)");
    }
    Ok(())
}

fn n_pairs(k: usize) -> usize {
    k * (k.saturating_sub(1)) / 2
}
