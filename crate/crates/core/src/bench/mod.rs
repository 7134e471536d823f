//! Dataset benchmark harness.
//!
//! For every image and every configured initializer the harness seeds
//! (timing the initialisation), fits k-means (timing convergence, counting
//! rounds and recording SSE) and averages the results per initializer.
//! Image decoding is outside both timers.

mod manifest;
mod report;

use std::time::Duration;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub use manifest::{DatasetManifest, Method, DEFAULT_RANDOM_SEEDS};
pub use report::{
    emit_report, format_sig, BenchReport, BenchRow, DatasetElbow, ReportFormat, RunMetadata,
};

use crate::elbow::{detect_elbow, k_sweep, SweepSeeder};
use crate::entropy::EntropySpec;
use crate::error::{Error, Result};
use crate::ingest::{load_image, to_grayscale, PixelGrid};
use crate::kmeans::{fit, Points};
use crate::seeding::{entropy_seed, random_seed, SeedingConfig};

/// Environment variable capping the worker count (0 or unset: automatic).
pub const THREADS_ENV: &str = "ENTROSEED_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BenchOptions {
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

impl BenchOptions {
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0);
        Self { threads }
    }
}

#[derive(Debug, Clone, Copy)]
struct RunRecord {
    nik: usize,
    init_time: Duration,
    compute_time: Duration,
    sse: f64,
}

struct Job {
    method: usize,
    image: usize,
    rng_seed: Option<u64>,
}

fn run_one(
    grid: &PixelGrid,
    points: &Points,
    manifest: &DatasetManifest,
    method: &Method,
    rng_seed: Option<u64>,
) -> Result<RunRecord> {
    let seeds = match (method, rng_seed) {
        (Method::Entropy(spec), _) => {
            let mut cfg = SeedingConfig::new(manifest.k, *spec).policy(manifest.exhaustion_policy);
            cfg.th = manifest.th;
            entropy_seed(grid, &cfg)?
        }
        (Method::Random { .. }, seed) => {
            random_seed(grid, manifest.k, seed.unwrap_or(manifest.rng_seed))?
        }
    };
    let result = fit(points, &seeds, &manifest.kmeans)?;
    Ok(RunRecord {
        nik: result.nik,
        init_time: seeds.init_time,
        compute_time: result.compute_time,
        sse: result.sse,
    })
}

fn load_dataset(manifest: &DatasetManifest) -> Result<Vec<PixelGrid>> {
    manifest
        .image_paths
        .iter()
        .map(|path| {
            let grid = load_image(path)?;
            match (manifest.channels_expected, grid.channels()) {
                (1, 3) => Ok(to_grayscale(&grid)),
                (3, 1) => Err(Error::format(
                    path,
                    "manifest expects 3 channels but the image has 1",
                )),
                _ => Ok(grid),
            }
        })
        .collect()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Run every method on every image of one dataset.
pub fn run_benchmark(manifest: &DatasetManifest, options: &BenchOptions) -> Result<BenchReport> {
    run_benchmarks(std::slice::from_ref(manifest), options)
}

/// Run several datasets; rows follow manifest order, then method order.
pub fn run_benchmarks(
    manifests: &[DatasetManifest],
    options: &BenchOptions,
) -> Result<BenchReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| Error::Report(format!("cannot start worker pool: {e}")))?;
    let mut rows = Vec::new();
    let mut elbows = Vec::new();
    for manifest in manifests {
        let grids = load_dataset(manifest)?;
        let points: Vec<Points> = grids.iter().map(Points::from_grid).collect();

        let mut jobs = Vec::new();
        for (m, method) in manifest.methods.iter().enumerate() {
            for image in 0..grids.len() {
                match method {
                    Method::Random { seeds } => jobs.extend((0..*seeds as u64).map(|s| Job {
                        method: m,
                        image,
                        rng_seed: Some(manifest.rng_seed.wrapping_add(s)),
                    })),
                    Method::Entropy(_) => jobs.push(Job {
                        method: m,
                        image,
                        rng_seed: None,
                    }),
                }
            }
        }
        let outcomes: Vec<Result<RunRecord>> = pool.install(|| {
            jobs.par_iter()
                .map(|job| {
                    run_one(
                        &grids[job.image],
                        &points[job.image],
                        manifest,
                        &manifest.methods[job.method],
                        job.rng_seed,
                    )
                })
                .collect()
        });

        for (m, method) in manifest.methods.iter().enumerate() {
            let mut per_image = Vec::new();
            let mut failures = Vec::new();
            for image in 0..grids.len() {
                let runs: Vec<&Result<RunRecord>> = jobs
                    .iter()
                    .zip(&outcomes)
                    .filter(|(j, _)| j.method == m && j.image == image)
                    .map(|(_, o)| o)
                    .collect();
                if let Some(Err(e)) = runs.iter().find(|r| r.is_err()) {
                    failures.push(format!("{}: {e}", manifest.image_paths[image].display()));
                    continue;
                }
                let ok: Vec<&RunRecord> = runs.iter().filter_map(|r| r.as_ref().ok()).collect();
                per_image.push(RunAverages {
                    nik: mean(ok.iter().map(|r| r.nik as f64)),
                    init: mean(ok.iter().map(|r| r.init_time.as_secs_f64())),
                    compute: mean(ok.iter().map(|r| r.compute_time.as_secs_f64())),
                    sse: mean(ok.iter().map(|r| r.sse)),
                });
            }
            let init_time = mean(per_image.iter().map(|a| a.init));
            let compute_time = mean(per_image.iter().map(|a| a.compute));
            rows.push(BenchRow {
                dataset: manifest.name.clone(),
                initialization: method.label(),
                avg_nik: mean(per_image.iter().map(|a| a.nik)),
                init_time,
                compute_time,
                total_time: init_time + compute_time,
                avg_sse: mean(per_image.iter().map(|a| a.sse)),
                images_used: per_image.len(),
                failures,
            });
        }

        if let Some(k_max) = manifest.elbow_k_max {
            elbows.push(run_elbow(manifest, &grids, &points, k_max)?);
        }
    }

    Ok(BenchReport {
        rows,
        metadata: RunMetadata {
            clock_source: "monotonic (std::time::Instant)".into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            config_hash: config_hash(manifests),
            nondeterministic_fields: vec![
                "init_time".into(),
                "compute_time".into(),
                "total_time".into(),
            ],
            threads: pool.current_num_threads(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        elbows,
    })
}

struct RunAverages {
    nik: f64,
    init: f64,
    compute: f64,
    sse: f64,
}

fn run_elbow(
    manifest: &DatasetManifest,
    grids: &[PixelGrid],
    points: &[Points],
    k_max: usize,
) -> Result<DatasetElbow> {
    let idx = manifest.representative_image;
    let spec = manifest
        .methods
        .iter()
        .find_map(|m| match m {
            Method::Entropy(spec) => Some(*spec),
            Method::Random { .. } => None,
        })
        .unwrap_or_else(EntropySpec::shannon);
    let mut base = SeedingConfig::new(1, spec).policy(manifest.exhaustion_policy);
    base.th = manifest.th;
    let seeder = SweepSeeder::Entropy {
        grid: &grids[idx],
        base,
    };
    let k_max = k_max.min(points[idx].distinct_count());
    let curve = k_sweep(&points[idx], 1..=k_max, &seeder, &manifest.kmeans)?;
    let suggested_k = if curve.entries.len() >= 3 {
        detect_elbow(&curve)?
    } else {
        None
    };
    Ok(DatasetElbow {
        dataset: manifest.name.clone(),
        image: manifest.image_paths[idx].display().to_string(),
        curve,
        suggested_k,
    })
}

fn config_hash(manifests: &[DatasetManifest]) -> String {
    let mut hasher = Sha256::new();
    for m in manifests {
        hasher.update(format!("{m:?}\n").as_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
