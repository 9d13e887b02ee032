//! SLIC initialization and windowed assignment in the joint spatial/CIELAB
//! space.

use crate::components::post_process;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::image::LabImage;
use crate::labels::{LabelMap, UNASSIGNED};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicParams {
    /// Target superpixel count.
    pub k: usize,
    /// Compactness: larger values weight the spatial term more heavily.
    pub m: f64,
    /// Number of assign/update passes. Zero still performs one assignment.
    pub max_iters: usize,
    /// Stop early once the summed L1 center displacement is at or below this.
    pub residual_threshold: f64,
}

impl SlicParams {
    pub fn new(k: usize, m: f64) -> Self {
        SlicParams {
            k,
            m,
            max_iters: 10,
            residual_threshold: 0.0,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    /// Grid spacing `h = √(N/k)`.
    pub fn spacing(&self, pixels: usize) -> f64 {
        grid_spacing(pixels, self.k)
    }

    pub fn validate(&self, pixels: usize) -> Result<()> {
        if self.k < 1 || self.k > pixels {
            return Err(Error::InvalidSuperpixelCount { k: self.k, pixels });
        }
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::InvalidParameter(format!("compactness m must be positive, got {}", self.m)));
        }
        if !(self.residual_threshold >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "residual threshold must be non-negative, got {}",
                self.residual_threshold
            )));
        }
        Ok(())
    }
}

pub fn grid_spacing(pixels: usize, k: usize) -> f64 {
    (pixels as f64 / k as f64).sqrt()
}

/// Largest integer offset strictly below `h`: the half-width of the
/// `2h × 2h` search window around a center rounded to the nearest pixel.
pub(crate) fn window_radius(h: f64) -> usize {
    (h.ceil() as usize).saturating_sub(1)
}

/// Inclusive pixel range `[lo, hi]` of a window around `center` along one axis.
pub(crate) fn window_range(center: f64, radius: usize, extent: usize) -> (usize, usize) {
    let c = center.round().clamp(0.0, (extent - 1) as f64) as usize;
    (c.saturating_sub(radius), (c + radius).min(extent - 1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterCenter {
    pub spatial: Vec2,
    pub color: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlicState {
    pub centers: Vec<ClusterCenter>,
    /// Summed L1 displacement of the spatial centers in the last update.
    pub residual: f64,
    /// Assign/update passes performed.
    pub iterations: usize,
    /// Clusters that received no pixels in the final assignment.
    pub empty: Vec<bool>,
    pub spacing: f64,
}

impl SlicState {
    pub fn non_empty_count(&self) -> usize {
        self.empty.iter().filter(|e| !**e).count()
    }
}

fn color_dist_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// `‖l(x+1,y) − l(x−1,y)‖² + ‖l(x,y+1) − l(x,y−1)‖²`, or +∞ where a
/// neighbour is missing.
pub fn color_gradient(img: &LabImage, x: i64, y: i64) -> f64 {
    let (w, h) = (img.width() as i64, img.height() as i64);
    if x < 1 || y < 1 || x + 1 >= w || y + 1 >= h {
        return f64::INFINITY;
    }
    let at = |x: i64, y: i64| img.color(x as usize, y as usize);
    color_dist_sq(at(x + 1, y), at(x - 1, y)) + color_dist_sq(at(x, y + 1), at(x, y - 1))
}

/// Squared SLIC distance `‖x_p − x_c‖² + (h²/m²)·‖l_p − l_c‖²`.
#[inline]
pub fn slic_distance_sq(position: Vec2, color: [f64; 3], center: &ClusterCenter, h: f64, m: f64) -> f64 {
    weighted_distance_sq(position, color, center, (h * h) / (m * m))
}

#[inline]
fn weighted_distance_sq(position: Vec2, color: [f64; 3], center: &ClusterCenter, color_weight: f64) -> f64 {
    let dx = position[0] - center.spatial[0];
    let dy = position[1] - center.spatial[1];
    dx * dx + dy * dy + color_weight * color_dist_sq(color, center.color)
}

/// Places exactly `k` centers on a square grid of spacing `h = √(N/k)` and
/// moves each to the lowest-gradient pixel of its 3×3 neighbourhood.
///
/// Grid points sit at `⌊h/2⌋ + i·h` rounded, taken in row-major order. When
/// the grid yields fewer than `k` points the remainder go to the
/// lowest-gradient unoccupied pixels, preferring pixels far from existing
/// centers on ties.
pub fn init_centers(img: &LabImage, k: usize) -> Result<Vec<ClusterCenter>> {
    let n = img.len();
    if k < 1 || k > n {
        return Err(Error::InvalidSuperpixelCount { k, pixels: n });
    }
    let (w, hgt) = (img.width(), img.height());
    let h = grid_spacing(n, k);
    let offset = (h / 2.0).floor();

    let mut grid: Vec<(usize, usize)> = Vec::with_capacity(k);
    'rows: for j in 0.. {
        let y = (offset + j as f64 * h).round();
        if y >= hgt as f64 {
            break;
        }
        for i in 0.. {
            let x = (offset + i as f64 * h).round();
            if x >= w as f64 {
                break;
            }
            grid.push((x as usize, y as usize));
            if grid.len() == k {
                break 'rows;
            }
        }
    }

    if grid.len() < k {
        // A short grid is the full lattice, so the nearest grid point is the
        // nearest lattice coordinate on each axis independently.
        let first = grid.first().copied();
        let xs: Vec<usize> = grid.iter().filter(|g| Some(g.1) == first.map(|f| f.1)).map(|g| g.0).collect();
        let ys: Vec<usize> = grid.iter().filter(|g| Some(g.0) == first.map(|f| f.0)).map(|g| g.1).collect();
        let axis = |len: usize, coords: &[usize]| -> Vec<f64> {
            (0..len)
                .map(|v| coords.iter().map(|&c| (c.abs_diff(v) as f64).powi(2)).fold(f64::INFINITY, f64::min))
                .collect()
        };
        let (dx, dy) = (axis(w, &xs), axis(hgt, &ys));
        let mut nearest: Vec<f64> = (0..n).map(|p| dx[p % w] + dy[p / w]).collect();
        let gradients: Vec<f64> = (0..n)
            .map(|p| color_gradient(img, (p % w) as i64, (p / w) as i64))
            .collect();
        let mut occupied = vec![false; n];
        for &(x, y) in &grid {
            occupied[y * w + x] = true;
        }
        while grid.len() < k {
            let best = (0..n)
                .filter(|&p| !occupied[p])
                .min_by(|&a, &b| {
                    gradients[a]
                        .total_cmp(&gradients[b])
                        .then_with(|| nearest[b].total_cmp(&nearest[a]))
                        .then(a.cmp(&b))
                })
                .expect("k <= N leaves an unoccupied pixel");
            occupied[best] = true;
            let (bx, by) = (best % w, best / w);
            for (p, d) in nearest.iter_mut().enumerate() {
                let e = (((p % w).abs_diff(bx)).pow(2) + ((p / w).abs_diff(by)).pow(2)) as f64;
                *d = d.min(e);
            }
            grid.push((bx, by));
        }
    }

    Ok(grid
        .into_iter()
        .map(|(gx, gy)| {
            let (gx, gy) = (gx as i64, gy as i64);
            let mut best = (gx, gy);
            let mut best_gradient = color_gradient(img, gx, gy);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let g = color_gradient(img, gx + dx, gy + dy);
                    if g < best_gradient {
                        best_gradient = g;
                        best = (gx + dx, gy + dy);
                    }
                }
            }
            let (x, y) = (best.0 as usize, best.1 as usize);
            ClusterCenter {
                spatial: [x as f64, y as f64],
                color: img.color(x, y),
            }
        })
        .collect())
}

fn assignment_pass(img: &LabImage, centers: &[ClusterCenter], h: f64, color_weight: f64, lm: &mut LabelMap) {
    let (w, hgt) = (img.width(), img.height());
    let radius = window_radius(h);
    lm.reset();
    for (i, c) in centers.iter().enumerate() {
        let (x0, x1) = window_range(c.spatial[0], radius, w);
        let (y0, y1) = window_range(c.spatial[1], radius, hgt);
        for y in y0..=y1 {
            let row = y * w;
            for x in x0..=x1 {
                let p = row + x;
                let d = weighted_distance_sq([x as f64, y as f64], img.colors()[p], c, color_weight);
                if d < lm.dist()[p] {
                    lm.set(p, i as i32, d);
                }
            }
        }
    }
    // Window rounding can leave pixels uncovered; give them to the nearest center.
    for p in 0..lm.len() {
        if lm.labels()[p] != UNASSIGNED {
            continue;
        }
        let pos = img.position(p);
        let color = img.colors()[p];
        let mut best = (f64::INFINITY, 0usize);
        for (i, c) in centers.iter().enumerate() {
            let d = weighted_distance_sq(pos, color, c, color_weight);
            if d < best.0 {
                best = (d, i);
            }
        }
        lm.set(p, best.1 as i32, best.0);
    }
}

/// Runs SLIC's iterative assignment phase. Returns the final total label map
/// and the cluster state; clusters that end up empty keep their previous
/// center and are flagged in [`SlicState::empty`].
pub fn run_assignment(img: &LabImage, params: &SlicParams) -> Result<(LabelMap, SlicState)> {
    params.validate(img.len())?;
    let h = params.spacing(img.len());
    let color_weight = (h * h) / (params.m * params.m);
    let mut centers = init_centers(img, params.k)?;
    let mut lm = LabelMap::unassigned(img.width(), img.height());

    let passes = params.max_iters.max(1);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut counts = vec![0usize; centers.len()];
    for _ in 0..passes {
        assignment_pass(img, &centers, h, color_weight, &mut lm);
        iterations += 1;

        let mut sums = vec![[0.0f64; 5]; centers.len()];
        counts.fill(0);
        for (p, &l) in lm.labels().iter().enumerate() {
            let pos = img.position(p);
            let col = img.colors()[p];
            let s = &mut sums[l as usize];
            s[0] += pos[0];
            s[1] += pos[1];
            s[2] += col[0];
            s[3] += col[1];
            s[4] += col[2];
            counts[l as usize] += 1;
        }
        residual = 0.0;
        for ((c, s), &n) in centers.iter_mut().zip(&sums).zip(&counts) {
            if n == 0 {
                continue;
            }
            // Division rather than a reciprocal keeps integer means exact.
            let n = n as f64;
            let spatial = [s[0] / n, s[1] / n];
            residual += (spatial[0] - c.spatial[0]).abs() + (spatial[1] - c.spatial[1]).abs();
            *c = ClusterCenter {
                spatial,
                color: [s[2] / n, s[3] / n, s[4] / n],
            };
        }
        if residual <= params.residual_threshold {
            break;
        }
    }

    let empty = counts.iter().map(|&n| n == 0).collect();
    Ok((
        lm,
        SlicState {
            centers,
            residual,
            iterations,
            empty,
            spacing: h,
        },
    ))
}

/// Classic SLIC: assignment phase followed by connectivity post-processing,
/// with the merge threshold derived from the number of labels actually used.
pub fn slic_superpixels(img: &LabImage, params: &SlicParams) -> Result<LabelMap> {
    let (lm, _) = run_assignment(img, params)?;
    let used = lm.num_labels_used();
    post_process(&lm, used)
}
