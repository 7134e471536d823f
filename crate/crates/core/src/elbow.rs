//! Elbow-method sweeps over k.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PixelGrid;
use crate::kmeans::{fit, KMeansConfig, KMeansResult, Points};
use crate::seeding::{entropy_seed, random_seed_points, SeedingConfig};

/// How each k in a sweep is initialised.
#[derive(Debug, Clone)]
pub enum SweepSeeder<'a> {
    /// Entropy seeding on `grid`; `base.k` is replaced by each swept k.
    Entropy {
        grid: &'a PixelGrid,
        base: SeedingConfig,
    },
    /// Random seeding; with `restarts > 1` the lowest-SSE fit is kept, each
    /// restart `r` drawing from seed `rng_seed + r`.
    Random { rng_seed: u64, restarts: usize },
}

impl SweepSeeder<'_> {
    pub fn tag(&self) -> String {
        match self {
            SweepSeeder::Entropy { base, .. } => base.spec.label(),
            SweepSeeder::Random { restarts: 1, .. } => "Random".into(),
            SweepSeeder::Random { restarts, .. } => format!("Random(best of {restarts})"),
        }
    }

    fn fit_k(&self, points: &Points, k: usize, config: &KMeansConfig) -> Result<KMeansResult> {
        match self {
            SweepSeeder::Entropy { grid, base } => {
                let seeds = entropy_seed(grid, &SeedingConfig { k, ..base.clone() })?;
                Ok(fit(points, &seeds, config)?)
            }
            SweepSeeder::Random { rng_seed, restarts } => {
                let mut best: Option<KMeansResult> = None;
                for r in 0..(*restarts).max(1) {
                    let seeds = random_seed_points(points, k, rng_seed.wrapping_add(r as u64))?;
                    let result = fit(points, &seeds, config)?;
                    if best.as_ref().is_none_or(|b| result.sse < b.sse) {
                        best = Some(result);
                    }
                }
                Ok(best.expect("at least one restart"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElbowPoint {
    pub k: usize,
    /// Converged SSE.
    pub inertia: f64,
    /// Mean squared distance to the nearest centroid, `inertia / n`.
    pub dispersion: f64,
    pub nik: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElbowCurve {
    pub entries: Vec<ElbowPoint>,
    pub seeding_used: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cost {
    Inertia,
    Dispersion,
}

impl ElbowCurve {
    /// Two whitespace-separated columns, `k` and the chosen cost, with a
    /// `#` header line.
    pub fn plot_data(&self, cost: Cost) -> String {
        let name = match cost {
            Cost::Inertia => "inertia",
            Cost::Dispersion => "dispersion",
        };
        let mut out = format!("# k {name}\n");
        for e in &self.entries {
            let v = match cost {
                Cost::Inertia => e.inertia,
                Cost::Dispersion => e.dispersion,
            };
            let _ = writeln!(out, "{} {v}", e.k);
        }
        out
    }
}

/// Fit every k in `k_range` and record its inertia and dispersion.
pub fn k_sweep(
    points: &Points,
    k_range: RangeInclusive<usize>,
    seeder: &SweepSeeder<'_>,
    config: &KMeansConfig,
) -> Result<ElbowCurve> {
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo == 0 || lo > hi {
        return Err(Error::Elbow(format!("invalid k range {lo}..={hi}")));
    }
    let distinct = points.distinct_count();
    if hi > distinct {
        return Err(Error::Elbow(format!(
            "k = {hi} exceeds the {distinct} distinct points"
        )));
    }
    let n = points.len() as f64;
    let entries = k_range
        .into_par_iter()
        .map(|k| {
            let r = seeder.fit_k(points, k, config)?;
            Ok(ElbowPoint {
                k,
                inertia: r.sse,
                dispersion: r.sse / n,
                nik: r.nik,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ElbowCurve {
        entries,
        seeding_used: seeder.tag(),
    })
}

/// Interior k with the largest positive second difference of inertia.
///
/// Ties go to the smallest k; `None` when no second difference is positive.
pub fn detect_elbow(curve: &ElbowCurve) -> Result<Option<usize>> {
    let e = &curve.entries;
    if e.len() < 3 {
        return Err(Error::Elbow(format!(
            "need at least 3 curve entries, got {}",
            e.len()
        )));
    }
    let mut best: Option<(usize, f64)> = None;
    for w in e.windows(3) {
        let d2 = w[0].inertia - 2.0 * w[1].inertia + w[2].inertia;
        if d2 > 0.0 && best.is_none_or(|(_, b)| d2 > b) {
            best = Some((w[1].k, d2));
        }
    }
    Ok(best.map(|(k, _)| k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(inertia: &[f64]) -> ElbowCurve {
        ElbowCurve {
            entries: inertia
                .iter()
                .enumerate()
                .map(|(i, &v)| ElbowPoint {
                    k: i + 1,
                    inertia: v,
                    dispersion: v,
                    nik: 1,
                })
                .collect(),
            seeding_used: "test".into(),
        }
    }

    #[test]
    fn detects_sharp_bend() {
        assert_eq!(
            detect_elbow(&curve(&[100.0, 20.0, 18.0, 17.0])).unwrap(),
            Some(2)
        );
    }

    #[test]
    fn linear_curve_has_no_elbow() {
        assert_eq!(detect_elbow(&curve(&[30.0, 20.0, 10.0])).unwrap(), None);
    }

    #[test]
    fn short_curve_is_an_error() {
        assert!(detect_elbow(&curve(&[3.0, 1.0])).is_err());
    }

    #[test]
    fn scale_invariant() {
        let base = [250.0, 90.0, 40.0, 31.0, 27.0];
        let scaled: Vec<f64> = base.iter().map(|v| v * 7.5).collect();
        assert_eq!(
            detect_elbow(&curve(&base)).unwrap(),
            detect_elbow(&curve(&scaled)).unwrap()
        );
    }

    #[test]
    fn sweep_on_line() {
        let pts = Points::new(1, vec![0.0, 1.0, 10.0, 11.0]).unwrap();
        let seeder = SweepSeeder::Random {
            rng_seed: 3,
            restarts: 4,
        };
        let c = k_sweep(&pts, 1..=2, &seeder, &KMeansConfig::default()).unwrap();
        assert_eq!(c.entries[0].inertia, 101.0);
        assert_eq!(c.entries[1].inertia, 1.0);
        for e in &c.entries {
            assert_eq!(e.dispersion, e.inertia / 4.0);
        }
        // reaching the distinct-point bound drives inertia to zero
        let c = k_sweep(&pts, 1..=4, &seeder, &KMeansConfig::default()).unwrap();
        assert_eq!(c.entries[3].inertia, 0.0);
        assert!(k_sweep(&pts, 1..=5, &seeder, &KMeansConfig::default()).is_err());
        assert!(k_sweep(&pts, 0..=2, &seeder, &KMeansConfig::default()).is_err());
    }

    #[test]
    fn repeated_point_has_zero_cost() {
        let pts = Points::new(2, vec![3.0; 20]).unwrap();
        let seeder = SweepSeeder::Random {
            rng_seed: 0,
            restarts: 1,
        };
        let c = k_sweep(&pts, 1..=1, &seeder, &KMeansConfig::default()).unwrap();
        assert_eq!((c.entries[0].inertia, c.entries[0].dispersion), (0.0, 0.0));
    }

    #[test]
    fn entropy_sweep_on_grid() {
        let grid = PixelGrid::new(4, 2, 1, vec![0, 0, 10, 10, 200, 200, 210, 90]).unwrap();
        let pts = Points::from_grid(&grid);
        let seeder = SweepSeeder::Entropy {
            grid: &grid,
            base: SeedingConfig::new(1, crate::entropy::EntropySpec::shannon()),
        };
        let c = k_sweep(&pts, 1..=3, &seeder, &KMeansConfig::default()).unwrap();
        assert_eq!(c.seeding_used, "Shannon");
        assert!(c.entries.windows(2).all(|w| w[1].inertia <= w[0].inertia));
        let plot = c.plot_data(Cost::Dispersion);
        assert!(plot.starts_with("# k dispersion\n1 "));
        assert_eq!(plot.lines().count(), 4);
    }
}
