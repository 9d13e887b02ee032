//! RGB and CIELAB rasters, sRGB → CIELAB conversion and additive Gaussian
//! noise.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Row-major RGB raster with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<[f64; 3]>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: data.len(),
            });
        }
        if let Some(&v) = data
            .iter()
            .flatten()
            .find(|v| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::ChannelOutOfRange(v));
        }
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    /// Builds an image from a per-pixel closure `f(x, y)`; values are
    /// clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).map(|c| c.clamp(0.0, 1.0)));
            }
        }
        RgbImage {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        self.data[y * self.width + x]
    }
}

/// Row-major CIELAB raster. The spatial position of pixel `(x, y)` is the
/// integer pair `(column, row)` with the origin at the top-left pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    width: usize,
    height: usize,
    colors: Vec<[f64; 3]>,
}

impl LabImage {
    pub fn from_colors(width: usize, height: usize, colors: Vec<[f64; 3]>) -> Result<Self> {
        if colors.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: colors.len(),
            });
        }
        Ok(LabImage {
            width,
            height,
            colors,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Total pixel count N.
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[[f64; 3]] {
        &self.colors
    }

    #[inline]
    pub fn color(&self, x: usize, y: usize) -> [f64; 3] {
        self.colors[y * self.width + x]
    }

    #[inline]
    pub fn position(&self, index: usize) -> Vec2 {
        [(index % self.width) as f64, (index / self.width) as f64]
    }
}

/// sRGB primaries, D65 white.
const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

fn srgb_decode(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// Converts one sRGB triple in `[0, 1]` to CIE 1976 L*a*b*.
pub fn srgb_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let linear = rgb.map(srgb_decode);
    let mut xyz = [0.0; 3];
    // The reference white is the image of RGB (1,1,1), so white maps to a* = b* = 0.
    let mut white = [0.0; 3];
    for (row, (out, w)) in SRGB_TO_XYZ.iter().zip(xyz.iter_mut().zip(white.iter_mut())) {
        *out = row.iter().zip(linear).map(|(m, c)| m * c).sum();
        *w = row.iter().sum();
    }
    let [fx, fy, fz] = [0, 1, 2].map(|i| lab_f(xyz[i] / white[i]));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn rgb_to_lab(img: &RgbImage) -> LabImage {
    LabImage {
        width: img.width,
        height: img.height,
        colors: img.data.iter().map(|&p| srgb_to_lab(p)).collect(),
    }
}

/// Zero-mean white Gaussian noise of the given variance on each RGB channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub variance: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(variance: f64, seed: u64) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be finite and non-negative, got {variance}"
            )));
        }
        Ok(NoiseSpec { variance, seed })
    }
}

#[inline]
fn unit_open_closed(bits: u64) -> f64 {
    // (0, 1]: never zero, so the logarithm below is finite.
    1.0 - (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn unit_closed_open(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Adds `N(0, σ²)` to every channel and clamps to `[0, 1]`.
///
/// Samples come from a ChaCha8 stream seeded with `spec.seed`. Each pixel
/// consumes exactly four 64-bit words in raster order, turned into two
/// Box–Muller pairs of which the first three normals are used for R, G, B.
/// The result depends only on `(img, spec)`.
pub fn add_gaussian_noise(img: &RgbImage, spec: NoiseSpec) -> RgbImage {
    if spec.variance == 0.0 {
        return img.clone();
    }
    let sigma = spec.variance.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data = img
        .data
        .iter()
        .map(|px| {
            let mut words = [0u64; 4];
            for w in &mut words {
                *w = rng.next_u64();
            }
            let (z0, z1) = box_muller(words[0], words[1]);
            let (z2, _) = box_muller(words[2], words[3]);
            let z = [z0, z1, z2];
            [0, 1, 2].map(|c| (px[c] + sigma * z[c]).clamp(0.0, 1.0))
        })
        .collect();
    RgbImage {
        width: img.width,
        height: img.height,
        data,
    }
}

fn box_muller(a: u64, b: u64) -> (f64, f64) {
    let radius = (-2.0 * unit_open_closed(a).ln()).sqrt();
    let theta = std::f64::consts::TAU * unit_closed_open(b);
    (radius * theta.cos(), radius * theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn black_and_white() {
        assert_eq!(srgb_to_lab([0.0; 3]), [0.0, 0.0, 0.0]);
        let [l, a, b] = srgb_to_lab([1.0; 3]);
        assert_abs_diff_eq!(l, 100.0, epsilon = 1e-9);
        assert!(a.abs() < 0.01 && b.abs() < 0.01);
    }

    #[test]
    fn matches_reference_formulas() {
        // Independent evaluation with the textbook D65 white (0.95047, 1, 1.08883).
        let cases = [
            ([0.5, 0.5, 0.5], [53.388_967_054_079_73, 0.0, 0.0]),
            ([1.0, 0.0, 0.0], [53.240_794_141_307_22, 80.092_459_596_411_09, 67.203_196_515_853_01]),
            ([0.2, 0.6, 0.9], [60.929_734_472_567_09, -3.056_849_557_095_342_5, -46.841_898_592_865_084]),
        ];
        for (rgb, want) in cases {
            let got = srgb_to_lab(rgb);
            for c in 0..3 {
                assert_abs_diff_eq!(got[c], want[c], epsilon = 1e-3);
            }
        }
    }

    #[test]
    fn rejects_bad_images() {
        assert!(RgbImage::new(2, 2, vec![[0.0; 3]; 3]).is_err());
        assert!(matches!(
            RgbImage::new(1, 1, vec![[0.0, 1.5, 0.0]]),
            Err(Error::ChannelOutOfRange(_))
        ));
        assert!(NoiseSpec::new(-0.1, 0).is_err());
    }

    #[test]
    fn zero_variance_is_identity() {
        let img = RgbImage::from_fn(7, 5, |x, y| [x as f64 / 7.0, y as f64 / 5.0, 0.3]);
        assert_eq!(add_gaussian_noise(&img, NoiseSpec::new(0.0, 9).unwrap()), img);
    }

    #[test]
    fn noise_variance_matches() {
        let img = RgbImage::filled(400, 250, [0.5; 3]).unwrap();
        let noisy = add_gaussian_noise(&img, NoiseSpec::new(0.01, 17).unwrap());
        for c in 0..3 {
            let diffs: Vec<f64> = noisy.pixels().iter().map(|p| p[c] - 0.5).collect();
            let n = diffs.len() as f64;
            let mean = diffs.iter().sum::<f64>() / n;
            let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!((var - 0.01).abs() < 0.001, "channel {c}: variance {var}");
        }
    }

    #[test]
    fn seeds_reproduce_and_differ() {
        let img = RgbImage::filled(32, 32, [0.4, 0.5, 0.6]).unwrap();
        let a = add_gaussian_noise(&img, NoiseSpec::new(0.1, 1).unwrap());
        let b = add_gaussian_noise(&img, NoiseSpec::new(0.1, 1).unwrap());
        let c = add_gaussian_noise(&img, NoiseSpec::new(0.1, 2).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.pixels().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}
