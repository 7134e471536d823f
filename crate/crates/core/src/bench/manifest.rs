//! Dataset manifest files.
//!
//! A manifest is a `key = value` header followed by an `[images]` section
//! with one image path per line. Blank lines and lines starting with `#` are
//! ignored; relative paths resolve against the manifest's directory.
//!
//! ```text
//! name = Cars
//! channels = 3
//! k = 3
//! th = 220
//! representative = 0
//! method = random seeds=5
//! method = shannon
//! method = taneja alpha=2 beta=1
//!
//! [images]
//! car_01.ppm
//! car_02.ppm
//! ```
//!
//! Header keys:
//!
//! | key | required | meaning |
//! |-----|----------|---------|
//! | `name` | yes | dataset name used in reports |
//! | `channels` | yes | 1 or 3; colour images are converted to grayscale for 1 |
//! | `k` | yes | cluster count, at least 2 |
//! | `th` | no | seeding threshold; default half the intensity diameter |
//! | `representative` | no | index of the image used for the elbow sweep (default 0) |
//! | `method` | yes, repeatable | `random [seeds=N]` or `<measure> [alpha=A] [beta=B]` |
//! | `rng_seed` | no | base seed for random initialisation (default 0) |
//! | `max_iter`, `tol` | no | k-means settings (defaults 300, 1e-4) |
//! | `policy` | no | seed exhaustion policy, `adaptive` (default) or `strict` |
//! | `elbow_k_max` | no | run an elbow sweep over `1..=elbow_k_max` on the representative image |
//! | `image_dir` | no | add every PNG/JPEG/PPM/PGM file in the directory, sorted by name |

use std::fs;
use std::path::{Path, PathBuf};

use crate::entropy::{EntropySpec, Measure};
use crate::error::{Error, Result};
use crate::kmeans::KMeansConfig;
use crate::seeding::ExhaustionPolicy;

/// Random seeds per image when a `random` method gives none.
pub const DEFAULT_RANDOM_SEEDS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Random { seeds: usize },
    Entropy(EntropySpec),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Random { .. } => "Random".into(),
            Method::Entropy(spec) => spec.label(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    pub image_paths: Vec<PathBuf>,
    pub channels_expected: usize,
    pub k: usize,
    pub th: Option<f64>,
    pub representative_image: usize,
    pub methods: Vec<Method>,
    pub rng_seed: u64,
    pub kmeans: KMeansConfig,
    pub exhaustion_policy: ExhaustionPolicy,
    pub elbow_k_max: Option<usize>,
}

const IMAGE_EXTENSIONS: [&str; 6] = ["png", "jpg", "jpeg", "ppm", "pgm", "pnm"];

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base, path)
    }

    /// Parse manifest text; `base_dir` anchors relative paths and `origin`
    /// names the source in error messages.
    pub fn parse(text: &str, base_dir: &Path, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Manifest {
            path: origin.to_path_buf(),
            line,
            message,
        };

        let mut name = None;
        let mut channels = None;
        let mut k = None;
        let mut th = None;
        let mut representative = 0;
        let mut methods = Vec::new();
        let mut rng_seed = 0;
        let mut kmeans = KMeansConfig::default();
        let mut policy = ExhaustionPolicy::default();
        let mut elbow_k_max = None;
        let mut images = Vec::new();
        let mut in_images = false;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "[images]" {
                in_images = true;
                continue;
            }
            if in_images {
                images.push(base_dir.join(line));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(lineno, format!("expected `key = value`, got {line:?}")))?;
            let number = |what: &str| -> Result<f64> {
                value
                    .parse::<f64>()
                    .map_err(|_| err(lineno, format!("{what} must be a number, got {value:?}")))
            };
            let count = |what: &str| -> Result<usize> {
                value.parse::<usize>().map_err(|_| {
                    err(
                        lineno,
                        format!("{what} must be a non-negative integer, got {value:?}"),
                    )
                })
            };
            match key {
                "name" => name = Some(value.to_string()),
                "channels" => {
                    let c = count("channels")?;
                    if c != 1 && c != 3 {
                        return Err(err(lineno, format!("channels must be 1 or 3, got {c}")));
                    }
                    channels = Some(c);
                }
                "k" => k = Some(count("k")?),
                "th" => {
                    let t = number("th")?;
                    if !t.is_finite() || t < 0.0 {
                        return Err(err(lineno, format!("th must be non-negative, got {t}")));
                    }
                    th = Some(t);
                }
                "representative" => representative = count("representative")?,
                "rng_seed" => {
                    rng_seed = value.parse().map_err(|_| {
                        err(
                            lineno,
                            format!("rng_seed must be an integer, got {value:?}"),
                        )
                    })?
                }
                "max_iter" => kmeans.max_iter = count("max_iter")?,
                "tol" => kmeans.tol = number("tol")?,
                "policy" => {
                    policy = match value {
                        "adaptive" => ExhaustionPolicy::Adaptive,
                        "strict" => ExhaustionPolicy::Strict,
                        _ => return Err(err(lineno, format!("unknown policy {value:?}"))),
                    }
                }
                "elbow_k_max" => elbow_k_max = Some(count("elbow_k_max")?),
                "method" => methods.push(parse_method(value).map_err(|m| err(lineno, m))?),
                "image_dir" => {
                    let dir = base_dir.join(value);
                    images.extend(list_images(&dir)?);
                }
                _ => return Err(err(lineno, format!("unknown key {key:?}"))),
            }
        }

        let name = name.ok_or_else(|| err(0, "missing `name`".into()))?;
        let channels_expected = channels.ok_or_else(|| err(0, "missing `channels`".into()))?;
        let k = k.ok_or_else(|| err(0, "missing `k`".into()))?;
        if k < 2 {
            return Err(err(0, format!("k must be at least 2, got {k}")));
        }
        if methods.is_empty() {
            return Err(err(0, "no `method` lines".into()));
        }
        if images.is_empty() {
            return Err(err(0, "no images listed".into()));
        }
        if representative >= images.len() {
            return Err(err(
                0,
                format!(
                    "representative index {representative} out of range for {} images",
                    images.len()
                ),
            ));
        }
        if kmeans.max_iter == 0 || kmeans.tol.is_nan() || kmeans.tol < 0.0 {
            return Err(err(
                0,
                "max_iter must be positive and tol non-negative".into(),
            ));
        }
        if elbow_k_max == Some(0) {
            return Err(err(0, "elbow_k_max must be positive".into()));
        }

        Ok(Self {
            name,
            image_paths: images,
            channels_expected,
            k,
            th,
            representative_image: representative,
            methods,
            rng_seed,
            kmeans,
            exhaustion_policy: policy,
            elbow_k_max,
        })
    }
}

fn parse_method(value: &str) -> std::result::Result<Method, String> {
    let mut words = value.split_whitespace();
    let head = words.next().ok_or("empty method")?;
    let mut params = Vec::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| format!("expected `name=value`, got {w:?}"))?;
        params.push((k, v));
    }
    if head.eq_ignore_ascii_case("random") {
        let mut seeds = DEFAULT_RANDOM_SEEDS;
        for (k, v) in params {
            match k {
                "seeds" => {
                    seeds = v
                        .parse()
                        .ok()
                        .filter(|&s| s > 0)
                        .ok_or_else(|| format!("seeds must be a positive integer, got {v:?}"))?
                }
                _ => return Err(format!("unknown random parameter {k:?}")),
            }
        }
        return Ok(Method::Random { seeds });
    }
    let measure: Measure = head.parse()?;
    let mut spec = EntropySpec::new(measure);
    for (k, v) in params {
        let x: f64 = v
            .parse()
            .map_err(|_| format!("{k} must be a number, got {v:?}"))?;
        match k {
            "alpha" => spec.alpha = x,
            "beta" => spec.beta = x,
            _ => return Err(format!("unknown entropy parameter {k:?}")),
        }
    }
    spec.validate().map_err(|v| v.to_string())?;
    Ok(Method::Entropy(spec))
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let wanted = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if wanted {
            found.push(path);
        }
    }
    found.sort();
    Ok(found)
}
