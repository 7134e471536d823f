//! Generate the bundled mini dataset: small synthetic car scenes with smooth,
//! textured colour fields.
//!
//! Usage: cargo run --example make_mini_dataset -- <output-dir> [count]

use std::f64::consts::TAU;
use std::path::PathBuf;

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WIDTH: u32 = 64;
const HEIGHT: u32 = 48;

/// Sum of a few random low-frequency plane waves, scaled to roughly [-1, 1].
struct Field {
    waves: Vec<(f64, f64, f64, f64)>,
}

impl Field {
    fn new(rng: &mut ChaCha8Rng, octaves: usize) -> Self {
        let waves = (0..octaves)
            .map(|o| {
                let freq = (1.0 + o as f64) / WIDTH as f64;
                let angle = rng.random::<f64>() * TAU;
                let phase = rng.random::<f64>() * TAU;
                let amp = 1.0 / (1.0 + o as f64);
                (freq * angle.cos(), freq * angle.sin(), phase, amp)
            })
            .collect::<Vec<_>>();
        Self { waves }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let norm: f64 = self.waves.iter().map(|w| w.3).sum();
        self.waves
            .iter()
            .map(|&(fx, fy, phase, amp)| amp * (TAU * (fx * x + fy * y) + phase).sin())
            .sum::<f64>()
            / norm
    }
}

fn inside_car(x: f64, y: f64) -> bool {
    let body = (8.0..56.0).contains(&x) && (24.0..36.0).contains(&y);
    let cabin = (18.0..44.0).contains(&x) && (15.0..24.0).contains(&y) && {
        // sloped windscreen and rear window
        let left = 18.0 + (24.0 - y) * 0.6;
        let right = 44.0 - (24.0 - y) * 0.6;
        x >= left && x < right
    };
    body || cabin
}

fn inside_wheel(x: f64, y: f64) -> bool {
    [(18.0, 36.0), (46.0, 36.0)]
        .iter()
        .any(|&(cx, cy)| (x - cx).powi(2) + (y - cy).powi(2) < 30.0)
}

/// Colour paths: pixels are spread uniformly along two cube edges.
const PATHS: [[[f64; 3]; 3]; 4] = [
    [[0.0, 0.0, 0.0], [255.0, 0.0, 0.0], [255.0, 255.0, 0.0]],
    [[0.0, 0.0, 0.0], [0.0, 0.0, 255.0], [0.0, 255.0, 255.0]],
    [
        [255.0, 255.0, 255.0],
        [255.0, 0.0, 255.0],
        [255.0, 0.0, 0.0],
    ],
    [[0.0, 0.0, 0.0], [0.0, 255.0, 0.0], [255.0, 255.0, 0.0]],
];

fn along(path: &[[f64; 3]; 3], t: f64) -> [f64; 3] {
    let (a, b, u) = if t < 0.5 {
        (path[0], path[1], 2.0 * t)
    } else {
        (path[1], path[2], 2.0 * t - 1.0)
    };
    std::array::from_fn(|c| a[c] + (b[c] - a[c]) * u)
}

fn scene(index: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + index);
    let field = Field::new(&mut rng, 3);
    let n = (WIDTH * HEIGHT) as usize;
    // smooth scene value: background field, car body lifted, wheels dark
    let mut value = Vec::with_capacity(n);
    for i in 0..n {
        let (x, y) = ((i % WIDTH as usize) as f64, (i / WIDTH as usize) as f64);
        let mut v = field.at(x, y) + 0.15 * rng.random::<f64>();
        if inside_car(x, y) {
            v += 1.2;
        }
        if inside_wheel(x, y) {
            v = -10.0;
        }
        value.push(v);
    }
    // rank transform so the path parameter is uniform over the image
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| value[a].total_cmp(&value[b]));
    let mut t = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        t[i] = rank as f64 / (n - 1) as f64;
    }
    let path = &PATHS[index as usize % PATHS.len()];
    let mut img = RgbImage::new(WIDTH, HEIGHT);
    for (i, pixel) in img.pixels_mut().enumerate() {
        let colour = along(path, t[i]);
        *pixel = Rgb(std::array::from_fn(|c| {
            (colour[c] + rng.random_range(-8.0..8.0))
                .round()
                .clamp(0.0, 255.0) as u8
        }));
    }
    img
}

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "data/mini/cars".into()));
    let count: u64 = args
        .next()
        .map_or(4, |s| s.parse().expect("count must be an integer"));
    std::fs::create_dir_all(&dir).expect("create output directory");
    for i in 0..count {
        let path = dir.join(format!("car_{:02}.ppm", i + 1));
        let img = scene(i);
        let mut bytes = format!("P6\n{WIDTH} {HEIGHT}\n255\n").into_bytes();
        bytes.extend_from_slice(img.as_raw());
        std::fs::write(&path, bytes).expect("write image");
        println!("{}", path.display());
    }
}
