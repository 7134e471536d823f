//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain error (parameter validation, seed
//! exhaustion, clustering failure, bad manifest), 2 usage error, 3 I/O or
//! decode error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bench::{emit_report, run_benchmarks, BenchOptions, DatasetManifest, ReportFormat};
use crate::elbow::{detect_elbow, k_sweep, ElbowCurve, SweepSeeder};
use crate::entropy::{EntropySpec, Measure, ProbabilityVector};
use crate::error::Error;
use crate::ingest::{load_image, to_grayscale, PixelGrid};
use crate::kmeans::{fit, EmptyClusterPolicy, KMeansConfig, KMeansResult, Points};
use crate::seeding::{entropy_seed, random_seed, CentroidSet, ExhaustionPolicy, SeedingConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "entroseed",
    version,
    about = "Entropy-based centroid seeding and instrumented k-means for images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select initial centroids for an image and report them with the initialisation time.
    Seed(SeedArgs),
    /// Seed, then run k-means to convergence and report NIK, SSE and timings.
    Cluster(ClusterArgs),
    /// Sweep k, print the inertia/dispersion curve and the suggested elbow.
    Elbow(ElbowArgs),
    /// Run the dataset benchmark described by one or more manifests.
    Bench(BenchArgs),
    /// Evaluate an entropy measure on an explicit probability vector.
    Entropy(EntropyArgs),
}

/// Initializer choice: an entropy measure or the random baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Init {
    Random,
    Entropy(Measure),
}

impl FromStr for Init {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("random") {
            Ok(Init::Random)
        } else {
            s.parse().map(Init::Entropy)
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchFormat {
    Csv,
    Json,
    Markdown,
}

impl From<BenchFormat> for ReportFormat {
    fn from(f: BenchFormat) -> Self {
        match f {
            BenchFormat::Csv => ReportFormat::Csv,
            BenchFormat::Json => ReportFormat::Json,
            BenchFormat::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EmptyCluster {
    ReseedFarthest,
    DropError,
}

#[derive(Debug, Args)]
struct ImageArgs {
    /// Input image (PNG, JPEG, PPM or PGM, 8-bit)
    #[arg(long, value_name = "PATH")]
    image: PathBuf,

    /// Convert colour input to grayscale (BT.601) before processing
    #[arg(long)]
    grayscale: bool,
}

impl ImageArgs {
    fn load(&self) -> Result<PixelGrid, Error> {
        let grid = load_image(&self.image)?;
        Ok(if self.grayscale {
            to_grayscale(&grid)
        } else {
            grid
        })
    }
}

#[derive(Debug, Args)]
struct SeedingArgs {
    /// Entropy measure (shannon, kapur, aczel-daroczy, havrda-charvat, taneja, sharma-mittal) or `random`
    #[arg(long, value_name = "M", default_value = "shannon", value_parser = Init::from_str)]
    measure: Init,

    /// Measure parameter α [default: 2]
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Measure parameter β [default: kapur 2, sharma-mittal 2, taneja 1, aczel-daroczy 0.5]
    #[arg(long, value_name = "B", allow_negative_numbers = true)]
    beta: Option<f64>,

    /// Number of clusters
    #[arg(long, default_value_t = 3)]
    k: usize,

    /// Minimum intensity-space spacing between seeds [default: half the intensity diameter, ≈220 for RGB]
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    th: Option<f64>,

    /// Fail instead of halving the threshold when the seed list runs out
    #[arg(long)]
    strict: bool,

    /// Generator seed for `--measure random`
    #[arg(long, value_name = "N", default_value_t = 0)]
    rng_seed: u64,
}

impl SeedingArgs {
    fn spec(&self, measure: Measure) -> EntropySpec {
        let mut spec = EntropySpec::new(measure);
        if let Some(a) = self.alpha {
            spec.alpha = a;
        }
        if let Some(b) = self.beta {
            spec.beta = b;
        }
        spec
    }

    fn seed(&self, grid: &PixelGrid) -> Result<CentroidSet, Error> {
        match self.measure {
            Init::Random => Ok(random_seed(grid, self.k, self.rng_seed)?),
            Init::Entropy(measure) => {
                let spec = self.spec(measure);
                spec.validate()
                    .map_err(crate::entropy::EntropyError::from)?;
                let policy = if self.strict {
                    ExhaustionPolicy::Strict
                } else {
                    ExhaustionPolicy::Adaptive
                };
                let mut cfg = SeedingConfig::new(self.k, spec).policy(policy);
                cfg.th = self.th;
                Ok(entropy_seed(grid, &cfg)?)
            }
        }
    }
}

#[derive(Debug, Args)]
struct KMeansArgs {
    /// Maximum assign/update rounds
    #[arg(long, default_value_t = 300)]
    max_iter: usize,

    /// Convergence threshold on the largest centroid shift
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,

    /// What to do when a cluster loses all its points
    #[arg(long, value_enum, default_value_t = EmptyCluster::ReseedFarthest)]
    empty_cluster: EmptyCluster,
}

impl KMeansArgs {
    fn config(&self) -> KMeansConfig {
        KMeansConfig {
            max_iter: self.max_iter,
            tol: self.tol,
            empty_cluster_policy: match self.empty_cluster {
                EmptyCluster::ReseedFarthest => EmptyClusterPolicy::ReseedFarthest,
                EmptyCluster::DropError => EmptyClusterPolicy::DropError,
            },
        }
    }
}

#[derive(Debug, Args)]
struct SeedArgs {
    #[command(flatten)]
    image: ImageArgs,
    #[command(flatten)]
    seeding: SeedingArgs,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the output to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[command(flatten)]
    image: ImageArgs,
    #[command(flatten)]
    seeding: SeedingArgs,
    #[command(flatten)]
    kmeans: KMeansArgs,
    /// Write one cluster label per pixel (row-major, one per line) to FILE
    #[arg(long, value_name = "FILE")]
    labels_out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the output to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ElbowArgs {
    #[command(flatten)]
    image: ImageArgs,
    /// Smallest k in the sweep
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    /// Largest k in the sweep
    #[arg(long, default_value_t = 8)]
    k_max: usize,
    /// Entropy measure used to seed each k, or `random`
    #[arg(long, value_name = "M", default_value = "shannon", value_parser = Init::from_str)]
    measure: Init,
    /// Measure parameter α [default: 2]
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Measure parameter β [default: per measure]
    #[arg(long, value_name = "B", allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Seeding threshold [default: half the intensity diameter]
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    th: Option<f64>,
    /// Generator seed for `--measure random`
    #[arg(long, value_name = "N", default_value_t = 0)]
    rng_seed: u64,
    /// Random restarts per k for `--measure random` (lowest SSE kept)
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[command(flatten)]
    kmeans: KMeansArgs,
    /// Write the curve to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Dataset manifest; repeat for several datasets
    #[arg(long, value_name = "FILE", required = true)]
    manifest: Vec<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value_t = BenchFormat::Markdown)]
    format: BenchFormat,
    /// Write the report to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write elbow curves (k, inertia, dispersion) for datasets with `elbow_k_max` to FILE
    #[arg(long, value_name = "FILE")]
    elbow_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    /// Comma-separated probabilities, e.g. "0.5,0.5"
    #[arg(long, value_name = "P1,P2,...")]
    probs: String,
    /// Entropy measure
    #[arg(long, value_name = "M", default_value = "shannon", value_parser = Measure::from_str)]
    measure: Measure,
    /// Measure parameter α [default: 2]
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Measure parameter β [default: per measure]
    #[arg(long, value_name = "B", allow_negative_numbers = true)]
    beta: Option<f64>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_io() { EXIT_IO } else { EXIT_DOMAIN },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parse `argv` (program name first) and run, writing results to `stdout`
/// and diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Seed(args) => seed_cmd(&args),
        Command::Cluster(args) => cluster_cmd(&args),
        Command::Elbow(args) => elbow_cmd(&args),
        Command::Bench(args) => bench_cmd(&args),
        Command::Entropy(args) => entropy_cmd(&args),
    };
    match outcome.and_then(|(text, out)| deliver(&text, out.as_deref(), stdout)) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

type Outcome = Result<(Vec<u8>, Option<PathBuf>), Failure>;

fn deliver(bytes: &[u8], out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, bytes),
        None => stdout.write_all(bytes).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("cannot write output: {e}"),
        }),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::from(Error::io(path, e)))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{}", round6(*x))).collect();
    format!("[{}]", parts.join(", "))
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn describe_seeds(seeds: &CentroidSet, out: &mut String) {
    let _ = writeln!(out, "method: {}", seeds.method_tag);
    let _ = writeln!(out, "k: {}", seeds.k());
    if let Some(th) = seeds.effective_th {
        let _ = writeln!(out, "effective_th: {th}");
    }
    let _ = writeln!(out, "init_time_s: {:.6}", seeds.init_time.as_secs_f64());
    if seeds.k() > 1 {
        let _ = writeln!(out, "min_spacing: {:.6}", seeds.min_pairwise_distance());
    }
    let _ = writeln!(out, "centroids:");
    for (p, src) in seeds.points.iter().zip(&seeds.source_indices) {
        let _ = writeln!(out, "  {}  pixel {src}", fmt_vec(p));
    }
}

fn seeds_json(seeds: &CentroidSet) -> serde_json::Value {
    json!({
        "method": seeds.method_tag,
        "k": seeds.k(),
        "effective_th": seeds.effective_th,
        "init_time_s": seeds.init_time.as_secs_f64(),
        "centroids": seeds.points,
        "source_pixels": seeds.source_indices,
    })
}

fn seed_cmd(args: &SeedArgs) -> Outcome {
    let grid = args.image.load()?;
    let seeds = args.seeding.seed(&grid)?;
    let bytes = match args.format {
        OutputFormat::Text => {
            let mut out = String::new();
            describe_seeds(&seeds, &mut out);
            out.into_bytes()
        }
        OutputFormat::Json => json_bytes(&seeds_json(&seeds)),
    };
    Ok((bytes, args.out.clone()))
}

fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("json value serialises");
    bytes.push(b'\n');
    bytes
}

fn cluster_cmd(args: &ClusterArgs) -> Outcome {
    let grid = args.image.load()?;
    let points = Points::from_grid(&grid);
    let seeds = args.seeding.seed(&grid)?;
    let result = fit(&points, &seeds, &args.kmeans.config()).map_err(Error::from)?;
    if let Some(path) = &args.labels_out {
        let mut text = String::with_capacity(result.labels.len() * 2);
        for l in &result.labels {
            let _ = writeln!(text, "{l}");
        }
        write_file(path, text.as_bytes())?;
    }
    let total = seeds.init_time + result.compute_time;
    let bytes = match args.format {
        OutputFormat::Text => {
            let mut out = String::new();
            describe_seeds(&seeds, &mut out);
            describe_fit(&result, &mut out);
            let _ = writeln!(out, "total_time_s: {:.6}", total.as_secs_f64());
            out.into_bytes()
        }
        OutputFormat::Json => json_bytes(&json!({
            "seeding": seeds_json(&seeds),
            "kmeans": {
                "nik": result.nik,
                "converged": result.converged,
                "sse": result.sse,
                "compute_time_s": result.compute_time.as_secs_f64(),
                "centroids": result.centroids,
                "cluster_sizes": result.cluster_sizes(),
                "sse_history": result.sse_history,
            },
            "total_time_s": total.as_secs_f64(),
        })),
    };
    Ok((bytes, args.out.clone()))
}

fn describe_fit(result: &KMeansResult, out: &mut String) {
    let _ = writeln!(out, "nik: {}", result.nik);
    let _ = writeln!(out, "converged: {}", result.converged);
    let _ = writeln!(out, "sse: {}", round6(result.sse));
    let _ = writeln!(
        out,
        "compute_time_s: {:.6}",
        result.compute_time.as_secs_f64()
    );
    let _ = writeln!(out, "cluster_sizes: {:?}", result.cluster_sizes());
    let _ = writeln!(out, "final_centroids:");
    for c in &result.centroids {
        let _ = writeln!(out, "  {}", fmt_vec(c));
    }
}

fn curve_table(curve: &ElbowCurve) -> String {
    let mut out = String::from("# k inertia dispersion\n");
    for e in &curve.entries {
        let _ = writeln!(out, "{} {} {}", e.k, e.inertia, e.dispersion);
    }
    out
}

fn elbow_cmd(args: &ElbowArgs) -> Outcome {
    if args.k_min == 0 || args.k_min > args.k_max {
        return Err(usage(format!(
            "--k-min must be in 1..=--k-max (got {}..={})",
            args.k_min, args.k_max
        )));
    }
    let grid = args.image.load()?;
    let points = Points::from_grid(&grid);
    let seeder = match args.measure {
        Init::Random => SweepSeeder::Random {
            rng_seed: args.rng_seed,
            restarts: args.restarts.max(1),
        },
        Init::Entropy(measure) => {
            let mut spec = EntropySpec::new(measure);
            if let Some(a) = args.alpha {
                spec.alpha = a;
            }
            if let Some(b) = args.beta {
                spec.beta = b;
            }
            spec.validate()
                .map_err(|v| Error::from(crate::entropy::EntropyError::from(v)))?;
            let mut base = SeedingConfig::new(1, spec);
            base.th = args.th;
            SweepSeeder::Entropy { grid: &grid, base }
        }
    };
    let curve = k_sweep(
        &points,
        args.k_min..=args.k_max,
        &seeder,
        &args.kmeans.config(),
    )?;
    let mut out = format!("# seeding: {}\n", curve.seeding_used);
    out.push_str(&curve_table(&curve));
    let suggestion = if curve.entries.len() >= 3 {
        detect_elbow(&curve)?.map_or("none".to_string(), |k| k.to_string())
    } else {
        "none (fewer than 3 k values)".to_string()
    };
    let _ = writeln!(out, "# suggested k: {suggestion}");
    Ok((out.into_bytes(), args.out.clone()))
}

fn bench_cmd(args: &BenchArgs) -> Outcome {
    let manifests = args
        .manifest
        .iter()
        .map(DatasetManifest::load)
        .collect::<Result<Vec<_>, _>>()?;
    let report = run_benchmarks(&manifests, &BenchOptions::from_env())?;
    if let Some(path) = &args.elbow_out {
        let mut text = String::new();
        for e in &report.elbows {
            let _ = writeln!(
                text,
                "# dataset: {}\n# image: {}\n# seeding: {}\n# suggested k: {}",
                e.dataset,
                e.image,
                e.curve.seeding_used,
                e.suggested_k.map_or("none".to_string(), |k| k.to_string())
            );
            text.push_str(&curve_table(&e.curve));
            text.push('\n');
        }
        write_file(path, text.as_bytes())?;
    }
    Ok((emit_report(&report, args.format.into()), args.out.clone()))
}

fn entropy_cmd(args: &EntropyArgs) -> Outcome {
    let values = args
        .probs
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("--probs: {s:?} is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let p = ProbabilityVector::new(values).map_err(Error::from)?;
    let mut spec = EntropySpec::new(args.measure);
    if let Some(a) = args.alpha {
        spec.alpha = a;
    }
    if let Some(b) = args.beta {
        spec.beta = b;
    }
    let value = spec.evaluate(&p).map_err(Error::from)?;
    Ok((format!("{value:?}\n").into_bytes(), None))
}
