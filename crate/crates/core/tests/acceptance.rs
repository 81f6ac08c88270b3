//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `-- --nocapture` to see them).
//!
//! The oracles here (pair-counting ARI, grid-scan Minkowski center, naive
//! centroid-form Ward) are deliberately independent of the library's
//! implementation paths.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minkward::*;

// The criteria time algorithm phases and drive rayon internally; running them
// one at a time keeps the measurements honest on a small machine.
static GUARD: Mutex<()> = Mutex::new(());

fn guard() -> std::sync::MutexGuard<'static, ()> {
    GUARD.lock().unwrap_or_else(|e| e.into_inner())
}

/// Acceptance grid: the 1.1..5.0 lattice thinned to step 0.3.
const GRID_STEP_TENTHS: usize = 3;

fn random_partition(rng: &mut ChaCha8Rng, n: usize, k_max: usize) -> Partition {
    let k = rng.random_range(1..=k_max);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_labels(&labels).unwrap()
}

/// Pair-counting route: classify every entity pair as together/apart in each
/// partition; ARI = 2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d)).
fn ari_pair_oracle(x: &Partition, y: &Partition) -> f64 {
    let n = x.len();
    let (mut a, mut b, mut c, mut d) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in (i + 1)..n {
            match (x.label(i) == x.label(j), y.label(i) == y.label(j)) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    let denom = (a + b) * (b + d) + (a + c) * (c + d);
    if denom == 0.0 {
        let xa = Partition::from_labels(x.labels()).unwrap();
        let ya = Partition::from_labels(y.labels()).unwrap();
        return if xa.labels() == ya.labels() { 1.0 } else { 0.0 };
    }
    2.0 * (a * d - b * c) / denom
}

#[test]
fn criterion_01_ari_matches_pair_counting_oracle() {
    let _g = guard();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(2..=50);
        let x = random_partition(&mut rng, n, 6);
        let y = random_partition(&mut rng, n, 6);
        let fast = adjusted_rand(&x, &y).unwrap();
        let slow = ari_pair_oracle(&x, &y);
        worst = worst.max((fast - slow).abs());
        assert!(
            (fast - slow).abs() <= 1e-12,
            "ARI diverged from the pair oracle: {fast} vs {slow}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 (ARI oracle equivalence): PASS — 500 pairs, max |diff| = {worst:.2e}, {elapsed:.2?}"
    );
}

/// Exhaustive 1-D objective scan. A coarse pass brackets the minimiser
/// (valid: the objective is strictly convex, hence unimodal on any lattice),
/// then a 1e-6-step scan runs inside the bracket; equivalent to a full
/// 1e-6-step scan of the range.
fn grid_center_oracle(values: &[f64], p: f64) -> f64 {
    let objective = |c: f64| values.iter().map(|&v| (v - c).abs().powf(p)).sum::<f64>();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return 0.0;
    }
    let scan = |from: f64, to: f64, step: f64| -> (f64, f64) {
        let mut best_c = from;
        let mut best = objective(from);
        let mut c = from + step;
        while c <= to {
            let f = objective(c);
            if f < best {
                best = f;
                best_c = c;
            }
            c += step;
        }
        (best_c, best)
    };
    let coarse = (hi - lo) / 2000.0;
    let (c0, _) = scan(lo, hi, coarse);
    let (_, best) = scan((c0 - coarse).max(lo), (c0 + coarse).min(hi), 1e-6);
    best
}

#[test]
fn criterion_02_minkowski_center_beats_grid_oracle() {
    let _g = guard();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for case in 0..200 {
        let m = rng.random_range(1..=30);
        let values: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
        let points: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        for &p in &[1.5, 2.0, 2.5, 3.0, 4.2] {
            let center = minkowski_center(&points, p).unwrap()[0];
            let objective: f64 = values.iter().map(|&v| (v - center).abs().powf(p)).sum();
            let oracle = grid_center_oracle(&values, p);
            assert!(
                objective <= oracle + 1e-8,
                "case {case}, p = {p}: solver {objective} vs oracle {oracle}"
            );
            if p == 2.0 {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                assert!(
                    (center - mean).abs() <= 1e-10,
                    "p = 2 center {center} vs mean {mean}"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 2 (Minkowski center oracle equivalence): PASS — 200 clusters x 5 exponents, {elapsed:.2?}"
    );
}

/// Centroid-form reference: recompute the merge cost from raw centroids over
/// all live pairs each round.
fn naive_ward(centroids: &[Vec<f64>], sizes: &[usize], k_target: usize) -> Vec<Merge> {
    #[derive(Clone)]
    struct Cl {
        id: usize,
        size: usize,
        c: Vec<f64>,
    }
    let mut live: Vec<Cl> = centroids
        .iter()
        .zip(sizes)
        .enumerate()
        .map(|(id, (c, &s))| Cl {
            id,
            size: s,
            c: c.clone(),
        })
        .collect();
    let mut out = Vec::new();
    let mut next_id = centroids.len();
    while live.len() > k_target {
        let mut best = (0usize, 1usize);
        let mut best_cost = f64::INFINITY;
        let mut best_ids = (usize::MAX, usize::MAX);
        for a in 0..live.len() {
            for b in (a + 1)..live.len() {
                let cost = ward_cost(live[a].size, &live[a].c, live[b].size, &live[b].c);
                let ids = if live[a].id < live[b].id {
                    (live[a].id, live[b].id)
                } else {
                    (live[b].id, live[a].id)
                };
                if cost < best_cost || (cost == best_cost && ids < best_ids) {
                    best_cost = cost;
                    best = (a, b);
                    best_ids = ids;
                }
            }
        }
        let (a, b) = best;
        let (na, nb) = (live[a].size, live[b].size);
        let merged: Vec<f64> = live[a]
            .c
            .iter()
            .zip(&live[b].c)
            .map(|(&x, &y)| (na as f64 * x + nb as f64 * y) / (na + nb) as f64)
            .collect();
        out.push(Merge {
            left: best_ids.0,
            right: best_ids.1,
            cost: best_cost,
            size: na + nb,
        });
        live[a] = Cl {
            id: next_id,
            size: na + nb,
            c: merged,
        };
        live.remove(b);
        next_id += 1;
    }
    out
}

#[test]
fn criterion_03_lance_williams_reproduces_naive_ward() {
    let _g = guard();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for dataset in 0..50 {
        let n = rng.random_range(5..=200);
        let v = rng.random_range(1..=6);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..v).map(|_| rng.random_range(-4.0..4.0)).collect())
            .collect();
        let sizes = vec![1usize; n];
        let fast = ward_from_leaves(&rows, &sizes, 1).unwrap();
        let slow = naive_ward(&rows, &sizes, 1);
        assert_eq!(fast.merges().len(), slow.len(), "dataset {dataset}");
        for (step, (f, s)) in fast.merges().iter().zip(&slow).enumerate() {
            assert_eq!(
                (f.left, f.right),
                (s.left, s.right),
                "dataset {dataset}, merge {step}: pair diverged"
            );
            assert!(
                (f.cost - s.cost).abs() <= 1e-8,
                "dataset {dataset}, merge {step}: cost {} vs {}",
                f.cost,
                s.cost
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 3 (Lance-Williams = naive recomputation): PASS — 50 datasets, N <= 200, {elapsed:.2?}"
    );
}

#[test]
fn criterion_04_weight_law() {
    let _g = guard();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for case in 0..1000 {
        let v = rng.random_range(1..=12);
        let p = rng.random_range(1.1..5.0);
        let mut row: Vec<f64> = (0..v).map(|_| rng.random_range(0.0..10.0f64)).collect();
        // a third of the cases get zero dispersions planted
        if case % 3 == 0 {
            let zeros = rng.random_range(1..=v);
            for z in 0..zeros {
                row[z] = 0.0;
            }
        }
        let d = Dispersions {
            d: vec![row.clone()],
            p,
        };
        let w = &update_weights(&d, p).unwrap()[0];
        let sum: f64 = w.iter().sum();
        assert!(
            (sum - 1.0).abs() <= 1e-9,
            "case {case}: weights sum to {sum}"
        );
        assert!(w.iter().all(|&x| x >= 0.0));
        let lambda = rng.random_range(1e-3..1e3);
        let scaled = Dispersions {
            d: vec![row.iter().map(|x| x * lambda).collect()],
            p,
        };
        let w2 = &update_weights(&scaled, p).unwrap()[0];
        for (a, b) in w.iter().zip(w2) {
            assert!(
                (a - b).abs() <= 1e-9,
                "case {case}: scale variance {a} vs {b}"
            );
        }
    }
    println!("ACCEPTANCE 4 (weight law: row sums and scale invariance): PASS — 1000 rows");
}

fn clean_1000x20_10(seed: u64) -> GeneratedDataset {
    generate_mixture(&MixtureConfig::benchmark(1000, 20, 10, seed)).unwrap()
}

#[test]
fn criterion_05_a_ward_speedup() {
    let _g = guard();
    let started = Instant::now();
    let mut total_ok = 0usize;
    let mut merge_ok = 0usize;
    let mut ratios = Vec::new();
    for seed in 0..20u64 {
        let d = clean_1000x20_10(seed);
        let t = Instant::now();
        let _wd = ward(&d.matrix, 10).unwrap();
        let ward_time = t.elapsed();
        let r = a_ward(&d.matrix, 10, 1).unwrap();
        let a_total = r.init_time + r.merge_time;
        if a_total.as_secs_f64() <= 0.5 * ward_time.as_secs_f64() {
            total_ok += 1;
        }
        if r.merge_time.as_secs_f64() <= 0.1 * ward_time.as_secs_f64() {
            merge_ok += 1;
        }
        ratios.push(a_total.as_secs_f64() / ward_time.as_secs_f64());
    }
    let elapsed = started.elapsed();
    assert!(
        total_ok >= 18,
        "A-Ward total <= 0.5x Ward in only {total_ok}/20 runs (ratios: {ratios:.3?})"
    );
    assert!(
        merge_ok >= 18,
        "A-Ward agglomeration <= 0.1x Ward in only {merge_ok}/20 runs"
    );
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 (initialisation speedup): PASS — total<=0.5x in {total_ok}/20, agglomeration<=0.1x in {merge_ok}/20, mean ratio {:.3}, {elapsed:.2?}",
        ratios.iter().sum::<f64>() / 20.0
    );
}

fn noisy_matrix(entry: &BenchmarkEntry, seed: u64) -> (DataMatrix, Partition) {
    let cfg = MixtureConfig::benchmark(entry.n_entities, entry.n_features, entry.n_clusters, seed);
    let base = generate_mixture(&cfg).unwrap();
    let matrix = match &entry.noise {
        None => base.matrix,
        Some(NoiseSpec::NoiseFeatures { count }) => {
            add_noise_features(&base.matrix, *count, derive_seed(seed, 1))
        }
        Some(NoiseSpec::ClusterBlur { fraction }) => {
            blur_cluster_fragments(&base.matrix, &base.truth, *fraction, derive_seed(seed, 1))
                .unwrap()
        }
        Some(NoiseSpec::EntitySubstitution { .. }) => unreachable!(),
    };
    (matrix, base.truth)
}

#[test]
fn criterion_06_k_star_exceeds_true_cluster_count() {
    let _g = guard();
    let started = Instant::now();
    for entry in benchmark_table() {
        let mut k_stars = Vec::new();
        for seed in 0..20u64 {
            let (matrix, _) = noisy_matrix(&entry, seed);
            k_stars.push(ik_means(&matrix, 1).unwrap().k_star() as f64);
        }
        let mean = k_stars.iter().sum::<f64>() / k_stars.len() as f64;
        assert!(
            mean > entry.n_clusters as f64,
            "{}: mean K* {mean:.2} does not exceed {}",
            entry.display_name,
            entry.n_clusters
        );
        assert!(
            (10.0..=80.0).contains(&mean),
            "{}: mean K* {mean:.2} outside [10, 80]",
            entry.display_name
        );
        println!("  {}: mean K* = {mean:.2}", entry.display_name);
    }
    println!(
        "ACCEPTANCE 6 (K* inflation across all nine configurations): PASS — {:.2?}",
        started.elapsed()
    );
}

#[test]
fn criterion_07_clean_data_recovery() {
    let _g = guard();
    let started = Instant::now();
    let mut ward_aris = Vec::new();
    let mut a_ward_aris = Vec::new();
    for seed in 0..20u64 {
        let d = clean_1000x20_10(seed);
        let wp = ward(&d.matrix, 10).unwrap().cut(10).unwrap();
        ward_aris.push(adjusted_rand(&wp, &d.truth).unwrap());
        let ap = a_ward(&d.matrix, 10, 1).unwrap().entity_partition(10).unwrap();
        a_ward_aris.push(adjusted_rand(&ap, &d.truth).unwrap());
    }
    let mean_ward = ward_aris.iter().sum::<f64>() / 20.0;
    let mean_a_ward = a_ward_aris.iter().sum::<f64>() / 20.0;
    assert!(mean_ward >= 0.75, "ward mean ARI {mean_ward:.4} < 0.75");
    assert!(
        mean_a_ward >= 0.75,
        "a_ward mean ARI {mean_a_ward:.4} < 0.75"
    );
    assert!(
        (mean_ward - mean_a_ward).abs() <= 0.1,
        "recovery gap {:.4} > 0.1",
        (mean_ward - mean_a_ward).abs()
    );
    println!(
        "ACCEPTANCE 7 (clean-data recovery): PASS — ward {mean_ward:.4}, a_ward {mean_a_ward:.4}, {:.2?}",
        started.elapsed()
    );
}

fn best_grid_vs_ward(noise: NoiseSpec, seeds: u64) -> (f64, f64) {
    let entry = BenchmarkEntry {
        display_name: String::new(),
        n_entities: 1000,
        n_features: 20,
        n_clusters: 10,
        noise: Some(noise),
    };
    let spec = GridSpec::with_step_tenths(GRID_STEP_TENTHS).unwrap();
    let mut best_sum = 0.0;
    let mut ward_sum = 0.0;
    for seed in 0..seeds {
        let (matrix, truth) = noisy_matrix(&entry, seed);
        let grid = best_ari_over_grid(&matrix, &truth, 10, GridAlgorithm::AWardPb, &spec)
            .unwrap();
        best_sum += grid.best_ari_value().expect("at least one cell succeeded");
        let wp = ward(&matrix, 10).unwrap().cut(10).unwrap();
        ward_sum += adjusted_rand(&wp, &truth).unwrap();
    }
    (best_sum / seeds as f64, ward_sum / seeds as f64)
}

#[test]
fn criterion_08_noise_robustness_ordering() {
    let _g = guard();
    let started = Instant::now();

    let (best_nf, ward_nf) = best_grid_vs_ward(NoiseSpec::NoiseFeatures { count: 10 }, 20);
    assert!(
        best_nf >= 0.80,
        "+10NF: best-grid mean ARI {best_nf:.4} < 0.80"
    );
    assert!(
        best_nf - ward_nf >= 0.4,
        "+10NF: margin over ward {:.4} < 0.4 (ward {ward_nf:.4})",
        best_nf - ward_nf
    );
    println!("  +10NF: a_ward_pb best {best_nf:.4} vs ward {ward_nf:.4}");

    let (best_bl, ward_bl) = best_grid_vs_ward(NoiseSpec::ClusterBlur { fraction: 0.5 }, 20);
    assert!(
        best_bl >= 0.70,
        "50%N: best-grid mean ARI {best_bl:.4} < 0.70"
    );
    assert!(
        best_bl - ward_bl >= 0.4,
        "50%N: margin over ward {:.4} < 0.4 (ward {ward_bl:.4})",
        best_bl - ward_bl
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(7200), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 8 (noise robustness ordering): PASS — 50%N: a_ward_pb best {best_bl:.4} vs ward {ward_bl:.4}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_09_silhouette_selected_recovery() {
    let _g = guard();
    let started = Instant::now();
    let entry = BenchmarkEntry {
        display_name: String::new(),
        n_entities: 1000,
        n_features: 20,
        n_clusters: 10,
        noise: Some(NoiseSpec::NoiseFeatures { count: 10 }),
    };
    let spec = GridSpec::with_step_tenths(GRID_STEP_TENTHS).unwrap();
    let metrics = [
        MetricChoice::SqEuclidean,
        MetricChoice::Manhattan,
        MetricChoice::Minkowski,
    ];
    let mut manhattan_sum = 0.0;
    for seed in 0..10u64 {
        let (matrix, truth) = noisy_matrix(&entry, seed);
        let grid = run_grid(
            &matrix,
            10,
            GridAlgorithm::AWardPb,
            &spec,
            None,
            Some(&truth),
        )
        .unwrap();
        let best = grid.best_ari_value().expect("some cell succeeded");
        for metric in metrics {
            let scores = silhouettes_for(&matrix, &grid, metric).unwrap();
            let selected = scores
                .iter()
                .enumerate()
                .filter_map(|(i, s)| s.map(|v| (i, v)))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .map(|(i, _)| i)
                .expect("some scored cell");
            let selected_ari = grid.cells[selected].ari_vs_truth.unwrap();
            // max dominance is exact: the best column may never lose
            assert!(
                best >= selected_ari,
                "seed {seed}: best {best} < {:?}-selected {selected_ari}",
                metric.name()
            );
            if metric == MetricChoice::Manhattan {
                manhattan_sum += selected_ari;
            }
        }
    }
    let mean_manhattan = manhattan_sum / 10.0;
    assert!(
        mean_manhattan >= 0.7,
        "manhattan-selected mean ARI {mean_manhattan:.4} < 0.7"
    );
    println!(
        "ACCEPTANCE 9 (silhouette-selected recovery + max dominance): PASS — manhattan-selected mean ARI {mean_manhattan:.4}, {:.2?}",
        started.elapsed()
    );
}

#[test]
fn criterion_10_derived_micro_examples() {
    let _g = guard();
    // anomalous-cluster extraction hand trace
    let m = DataMatrix::from_rows(vec![vec![-0.1], vec![0.0], vec![0.1], vec![5.0]]).unwrap();
    let r = ik_means(&m, 1).unwrap();
    assert_eq!(r.k_star(), 2, "ik-means hand trace");

    // hand contingency table
    let a = Partition::from_labels(&[1, 1, 2, 2]).unwrap();
    let b = Partition::from_labels(&[1, 2, 1, 2]).unwrap();
    assert!((adjusted_rand(&a, &b).unwrap() + 0.5).abs() < 1e-15);

    // per-entity Silhouette evaluation
    let m = DataMatrix::from_rows(vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]]).unwrap();
    let s = Partition::from_labels(&[0, 0, 1, 1]).unwrap();
    let sil = silhouette(&m, &s, SilhouetteMetric::Manhattan).unwrap();
    assert!((sil - 0.89975).abs() <= 1e-5, "silhouette {sil}");

    // root of 6c^2 = 3(1-c)^2
    let c = minkowski_center(&[[0.0], [0.0], [1.0]], 3.0).unwrap()[0];
    assert!((c - 0.41421).abs() <= 1e-4, "center {c}");

    println!("ACCEPTANCE 10 (derived micro-examples): PASS — all four frozen values hold");
}
