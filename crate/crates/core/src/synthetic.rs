//! Synthetic test images with known region boundaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::{add_gaussian_noise, NoiseSpec, RgbImage};
use crate::labels::LabelMap;
use crate::metrics::BoundaryMap;

/// An image together with the region map it was painted from.
#[derive(Debug, Clone)]
pub struct SyntheticImage {
    pub image: RgbImage,
    pub regions: LabelMap,
}

impl SyntheticImage {
    /// Pixels with a 4-neighbour in another region. Unlike superpixel
    /// boundaries the image border is not included.
    pub fn ground_truth(&self) -> BoundaryMap {
        let (w, h) = (self.regions.width(), self.regions.height());
        let mut gt = BoundaryMap::empty(w, h);
        for y in 0..h {
            for x in 0..w {
                let l = self.regions.label(x, y);
                let differs = (x > 0 && self.regions.label(x - 1, y) != l)
                    || (x + 1 < w && self.regions.label(x + 1, y) != l)
                    || (y > 0 && self.regions.label(x, y - 1) != l)
                    || (y + 1 < h && self.regions.label(x, y + 1) != l);
                gt.set(x, y, differs);
            }
        }
        gt
    }
}

fn paint(width: usize, height: usize, labels: Vec<i32>, colors: &[[f64; 3]]) -> SyntheticImage {
    let image = RgbImage::from_fn(width, height, |x, y| colors[labels[y * width + x] as usize]);
    SyntheticImage {
        image,
        regions: LabelMap::from_labels(width, height, labels).expect("dimensions match"),
    }
}

/// Left half dark, right half light.
pub fn two_region(width: usize, height: usize) -> SyntheticImage {
    let labels = (0..width * height).map(|p| (p % width >= width / 2) as i32).collect();
    paint(width, height, labels, &[[0.2, 0.25, 0.3], [0.8, 0.75, 0.7]])
}

/// Nearest-seed regions around `regions` random seeds, each a random flat
/// colour.
pub fn random_regions(width: usize, height: usize, regions: usize, seed: u64) -> SyntheticImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<(f64, f64)> = (0..regions.max(1))
        .map(|_| (rng.gen_range(0.0..width as f64), rng.gen_range(0.0..height as f64)))
        .collect();
    let colors: Vec<[f64; 3]> = seeds.iter().map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
    let labels = (0..width * height)
        .map(|p| {
            let (x, y) = ((p % width) as f64, (p / width) as f64);
            let mut best = (f64::INFINITY, 0);
            for (i, &(sx, sy)) in seeds.iter().enumerate() {
                let d = (x - sx).powi(2) + (y - sy).powi(2);
                if d < best.0 {
                    best = (d, i as i32);
                }
            }
            best.1
        })
        .collect();
    paint(width, height, labels, &colors)
}

/// Mid-grey plus Gaussian noise.
pub fn constant_noise(width: usize, height: usize, variance: f64, seed: u64) -> RgbImage {
    let base = RgbImage::filled(width, height, [0.5; 3]).expect("valid colour");
    add_gaussian_noise(&base, NoiseSpec { variance, seed })
}
