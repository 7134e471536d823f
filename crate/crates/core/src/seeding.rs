//! Initial centroid selection.
//!
//! [`entropy_seed`] ranks pixels by their entropy score (highest first, ties
//! by row-major index) and greedily accepts pixels whose intensity tuple lies
//! farther than a threshold `th` from every centroid accepted so far, until
//! `k` centroids are found. [`random_seed`] is the baseline: `k` distinct
//! pixels drawn uniformly from a seeded generator.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::entropy::{leave_one_out_scores, EntropyError, EntropySpec};
use crate::ingest::PixelGrid;
use crate::kmeans::Points;
use crate::pixel_model::support_with_pixel_index;

/// What to do when the ranked pixel list runs out before `k` centroids are
/// accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExhaustionPolicy {
    /// Fail, reporting how many centroids were found.
    Strict,
    /// Halve the threshold and rescan, failing once it drops below one
    /// intensity unit.
    #[default]
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedingConfig {
    pub k: usize,
    /// Minimum intensity-space spacing; `None` means half the intensity
    /// diameter of the grid (about 220 for RGB).
    pub th: Option<f64>,
    pub spec: EntropySpec,
    pub exhaustion_policy: ExhaustionPolicy,
}

impl SeedingConfig {
    pub fn new(k: usize, spec: EntropySpec) -> Self {
        Self {
            k,
            th: None,
            spec,
            exhaustion_policy: ExhaustionPolicy::default(),
        }
    }

    pub fn threshold(mut self, th: f64) -> Self {
        self.th = Some(th);
        self
    }

    pub fn policy(mut self, policy: ExhaustionPolicy) -> Self {
        self.exhaustion_policy = policy;
        self
    }

    /// Threshold used for `grid`, resolving the default.
    pub fn threshold_for(&self, grid: &PixelGrid) -> f64 {
        self.th
            .unwrap_or_else(|| default_threshold(grid.channels()))
    }
}

/// Half the Euclidean diameter of the intensity cube for `channels`.
pub fn default_threshold(channels: usize) -> f64 {
    0.5 * 255.0 * (channels as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeedingError {
    #[error("invalid seeding config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(
        "seed list exhausted: found {found} of {requested} centroids with spacing > {threshold}"
    )]
    Exhausted {
        requested: usize,
        found: usize,
        threshold: f64,
    },
    #[error("cannot draw {requested} distinct points from {available}")]
    TooFewPoints { requested: usize, available: usize },
}

/// Initial centroids in intensity feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    pub points: Vec<Vec<f64>>,
    /// Initializer name, e.g. `Random` or `Taneja(2,1)`.
    pub method_tag: String,
    /// Spacing threshold in force when selection finished; `None` for
    /// initializers that do not enforce spacing.
    pub effective_th: Option<f64>,
    pub init_time: Duration,
    /// Row-major index of the pixel (or point) each centroid was taken from.
    pub source_indices: Vec<usize>,
}

impl CentroidSet {
    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Smallest pairwise Euclidean distance; infinite for fewer than two points.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min(euclidean(a, b));
            }
        }
        best
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn tuple_distance(a: &[u8], b: &[u8]) -> f64 {
    let squared: u32 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u32;
            d * d
        })
        .sum();
    (squared as f64).sqrt()
}

/// Entropy-maximisation seeding.
///
/// Pixels are ranked by [`crate::entropy::pixel_scores`]; the scan works on
/// distinct tuples ordered by (score descending, first pixel index
/// ascending), which accepts exactly the pixels a scan of the full sorted
/// pixel list would: a repeated tuple sits at distance 0 from an accepted
/// copy, and a rejected tuple stays rejected as the accepted set grows.
pub fn entropy_seed(grid: &PixelGrid, config: &SeedingConfig) -> Result<CentroidSet, SeedingError> {
    let start = Instant::now();
    if config.k == 0 {
        return Err(SeedingError::InvalidConfig("k must be at least 1".into()));
    }
    let mut th = config.threshold_for(grid);
    if !th.is_finite() || th < 0.0 {
        return Err(SeedingError::InvalidConfig(format!(
            "threshold must be a finite non-negative number, got {th}"
        )));
    }
    config.spec.validate().map_err(EntropyError::from)?;

    let (support, _) = support_with_pixel_index(grid);
    let scores = leave_one_out_scores(&support.probabilities(), &config.spec)?;
    let entries = support.entries();

    let mut ranked: Vec<usize> = (0..entries.len()).collect();
    ranked.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(entries[a].first_pixel.cmp(&entries[b].first_pixel))
    });

    let mut accepted: Vec<usize> = Vec::with_capacity(config.k);
    let mut taken = vec![false; entries.len()];
    loop {
        for &candidate in &ranked {
            if accepted.len() == config.k {
                break;
            }
            if taken[candidate] {
                continue;
            }
            let tuple = &entries[candidate].tuple;
            let clear = accepted
                .iter()
                .all(|&a| tuple_distance(tuple, &entries[a].tuple) > th);
            if clear {
                accepted.push(candidate);
                taken[candidate] = true;
            }
        }
        if accepted.len() == config.k {
            break;
        }
        if config.exhaustion_policy == ExhaustionPolicy::Strict || th < 1.0 {
            return Err(SeedingError::Exhausted {
                requested: config.k,
                found: accepted.len(),
                threshold: th,
            });
        }
        th /= 2.0;
    }

    Ok(CentroidSet {
        points: accepted
            .iter()
            .map(|&i| entries[i].tuple.iter().map(|&v| v as f64).collect())
            .collect(),
        method_tag: config.spec.label(),
        effective_th: Some(th),
        source_indices: accepted.iter().map(|&i| entries[i].first_pixel).collect(),
        init_time: start.elapsed(),
    })
}

/// Random baseline over an image's pixels.
pub fn random_seed(grid: &PixelGrid, k: usize, rng_seed: u64) -> Result<CentroidSet, SeedingError> {
    let start = Instant::now();
    let n = grid.pixel_count();
    let indices = sample_indices(n, k, rng_seed)?;
    Ok(CentroidSet {
        points: indices
            .iter()
            .map(|&i| grid.pixel(i).iter().map(|&v| v as f64).collect())
            .collect(),
        method_tag: "Random".into(),
        effective_th: None,
        source_indices: indices,
        init_time: start.elapsed(),
    })
}

/// Random baseline over arbitrary feature vectors.
pub fn random_seed_points(
    points: &Points,
    k: usize,
    rng_seed: u64,
) -> Result<CentroidSet, SeedingError> {
    let start = Instant::now();
    let indices = sample_indices(points.len(), k, rng_seed)?;
    Ok(CentroidSet {
        points: indices.iter().map(|&i| points.point(i).to_vec()).collect(),
        method_tag: "Random".into(),
        effective_th: None,
        source_indices: indices,
        init_time: start.elapsed(),
    })
}

fn sample_indices(n: usize, k: usize, rng_seed: u64) -> Result<Vec<usize>, SeedingError> {
    if k == 0 {
        return Err(SeedingError::InvalidConfig("k must be at least 1".into()));
    }
    if k > n {
        return Err(SeedingError::TooFewPoints {
            requested: k,
            available: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(rand::seq::index::sample(&mut rng, n, k).into_vec())
}
