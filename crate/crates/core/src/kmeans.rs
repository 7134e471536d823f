//! Instrumented Lloyd's k-means.
//!
//! Each round assigns every point to its nearest centroid (ties to the
//! lowest index) and moves each centroid to the mean of its points. The fit
//! stops when a round leaves every assignment unchanged, when no centroid
//! moves farther than `tol`, or after `max_iter` rounds. The round count,
//! including the final confirming round, is reported as `nik`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::PixelGrid;
use crate::seeding::{euclidean, CentroidSet};

/// Feature vectors of equal dimension, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self, KMeansError> {
        if dim == 0 {
            return Err(KMeansError::Shape(
                "point dimension must be positive".into(),
            ));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(KMeansError::Shape(format!(
                "{} values do not split into points of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, KMeansError> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(KMeansError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    /// One point per pixel, its intensity tuple as features.
    pub fn from_grid(grid: &PixelGrid) -> Self {
        Self {
            dim: grid.channels(),
            data: grid.data().iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    /// Number of distinct points (bitwise comparison).
    pub fn distinct_count(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = self
            .iter()
            .map(|p| p.iter().map(|v| v.to_bits()).collect())
            .collect();
        rows.sort_unstable();
        rows.dedup();
        rows.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyClusterPolicy {
    /// Move an emptied centroid onto the point farthest from its own centroid.
    #[default]
    ReseedFarthest,
    /// Abort the fit.
    DropError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub max_iter: usize,
    /// Convergence threshold on the largest centroid shift, in intensity units.
    pub tol: f64,
    pub empty_cluster_policy: EmptyClusterPolicy,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-4,
            empty_cluster_policy: EmptyClusterPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KMeansError {
    #[error("no points to cluster")]
    EmptyInput,
    #[error("no initial centroids")]
    NoCentroids,
    #[error("{points} points cannot form {k} clusters")]
    TooFewPoints { points: usize, k: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid k-means config: {0}")]
    InvalidConfig(String),
    #[error("cluster {cluster} became empty in iteration {iteration}")]
    EmptyCluster { cluster: usize, iteration: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Sum of squared distances to assigned centroids.
    pub sse: f64,
    /// Completed assign + update rounds.
    pub nik: usize,
    pub compute_time: Duration,
    /// False when `max_iter` ran out first.
    pub converged: bool,
    /// SSE after each round's update step.
    pub sse_history: Vec<f64>,
}

impl KMeansResult {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centroids.len()];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

const PARALLEL_ASSIGN_MIN: usize = 4096;

fn assign(points: &Points, centroids: &[Vec<f64>]) -> Vec<usize> {
    if points.len() >= PARALLEL_ASSIGN_MIN {
        points
            .data
            .par_chunks_exact(points.dim)
            .map(|p| nearest(p, centroids))
            .collect()
    } else {
        points.iter().map(|p| nearest(p, centroids)).collect()
    }
}

/// Sum of squared point-to-assigned-centroid distances.
pub fn sse(points: &Points, centroids: &[Vec<f64>], labels: &[usize]) -> Result<f64, KMeansError> {
    if labels.len() != points.len() {
        return Err(KMeansError::Shape(format!(
            "{} labels for {} points",
            labels.len(),
            points.len()
        )));
    }
    if let Some(c) = centroids.iter().find(|c| c.len() != points.dim()) {
        return Err(KMeansError::DimensionMismatch {
            expected: points.dim(),
            found: c.len(),
        });
    }
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| {
            centroids
                .get(l)
                .map(|c| squared_distance(p, c))
                .ok_or_else(|| KMeansError::Shape(format!("label {l} out of range")))
        })
        .sum()
}

/// Run Lloyd's algorithm from `init`.
pub fn fit(
    points: &Points,
    init: &CentroidSet,
    config: &KMeansConfig,
) -> Result<KMeansResult, KMeansError> {
    let start = Instant::now();
    if points.is_empty() {
        return Err(KMeansError::EmptyInput);
    }
    let k = init.k();
    if k == 0 {
        return Err(KMeansError::NoCentroids);
    }
    if points.len() < k {
        return Err(KMeansError::TooFewPoints {
            points: points.len(),
            k,
        });
    }
    if let Some(c) = init.points.iter().find(|c| c.len() != points.dim()) {
        return Err(KMeansError::DimensionMismatch {
            expected: points.dim(),
            found: c.len(),
        });
    }
    if config.max_iter == 0 {
        return Err(KMeansError::InvalidConfig(
            "max_iter must be at least 1".into(),
        ));
    }
    if config.tol.is_nan() || config.tol < 0.0 {
        return Err(KMeansError::InvalidConfig(format!(
            "tol must be non-negative, got {}",
            config.tol
        )));
    }

    let dim = points.dim();
    let mut centroids = init.points.clone();
    let mut labels: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut converged = false;
    let mut nik = 0;

    for iteration in 1..=config.max_iter {
        nik = iteration;
        let new_labels = assign(points, &centroids);
        let changed = new_labels != labels;
        labels = new_labels;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut updated: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .zip(&centroids)
            .map(|((s, &n), old)| {
                if n == 0 {
                    old.clone()
                } else {
                    s.into_iter().map(|v| v / n as f64).collect()
                }
            })
            .collect();

        let mut reseeded = false;
        let empties: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
        if !empties.is_empty() {
            if config.empty_cluster_policy == EmptyClusterPolicy::DropError {
                return Err(KMeansError::EmptyCluster {
                    cluster: empties[0],
                    iteration,
                });
            }
            let mut used = vec![false; points.len()];
            for &j in &empties {
                let farthest = points
                    .iter()
                    .zip(&labels)
                    .enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, (p, &l))| (i, squared_distance(p, &updated[l])))
                    .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                        Some((_, bd)) if bd >= d => best,
                        _ => Some((i, d)),
                    });
                if let Some((i, _)) = farthest {
                    used[i] = true;
                    updated[j] = points.point(i).to_vec();
                    reseeded = true;
                }
            }
        }

        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| euclidean(a, b))
            .fold(0.0, f64::max);
        centroids = updated;
        history.push(sse(points, &centroids, &labels)?);

        if !reseeded && (!changed || shift <= config.tol) {
            converged = true;
            break;
        }
    }

    Ok(KMeansResult {
        sse: *history.last().expect("at least one round ran"),
        centroids,
        labels,
        nik,
        compute_time: start.elapsed(),
        converged,
        sse_history: history,
    })
}
