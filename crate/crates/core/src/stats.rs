//! Per-label spatial moments of a label map.

use crate::error::{Error, Result};
use crate::geometry::{Mat2, Vec2};
use crate::labels::{LabelMap, UNASSIGNED};

/// Default covariance regularization in pixel²: a lone pixel is treated like
/// a disc of radius ½.
pub const DEFAULT_COVARIANCE_EPS: f64 = 0.25;

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BBox {
    pub fn point(x: usize, y: usize) -> Self {
        BBox {
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
        }
    }

    pub fn include(&mut self, x: usize, y: usize) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.min_x..=self.max_x).contains(&x) && (self.min_y..=self.max_y).contains(&y)
    }

    /// Grows the box by `r` pixels on every side, clipped to the image.
    pub fn dilate(&self, r: usize, width: usize, height: usize) -> BBox {
        BBox {
            min_x: self.min_x.saturating_sub(r),
            min_y: self.min_y.saturating_sub(r),
            max_x: (self.max_x + r).min(width - 1),
            max_y: (self.max_y + r).min(height - 1),
        }
    }

    pub fn area(&self) -> usize {
        (self.max_x - self.min_x + 1) * (self.max_y - self.min_y + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    pub label: i32,
    /// Mean pixel coordinate.
    pub center: Vec2,
    /// Regularized population covariance of the pixel coordinates.
    pub covariance: Mat2,
    /// Pixel count κ.
    pub area: usize,
    pub bbox: BBox,
}

/// Returns `Σ + ε·I` for a symmetric `Σ`.
pub fn regularize_covariance(sigma: Mat2, eps: f64) -> Result<Mat2> {
    if !sigma.is_symmetric(1e-9) {
        return Err(Error::AsymmetricMatrix(sigma.0));
    }
    Ok(sigma.add_scaled_identity(eps))
}

pub fn compute_stats(lm: &LabelMap) -> Vec<ComponentStats> {
    compute_stats_with(lm, DEFAULT_COVARIANCE_EPS)
}

/// One entry per non-empty label in ascending label order. Means come from a
/// first pass, covariances from a second pass over centred coordinates.
/// Unassigned pixels are ignored.
pub fn compute_stats_with(lm: &LabelMap, eps: f64) -> Vec<ComponentStats> {
    let w = lm.width();
    let bound = lm.label_bound();
    let mut count = vec![0usize; bound];
    let mut sum = vec![[0.0f64; 2]; bound];
    let mut bbox: Vec<Option<BBox>> = vec![None; bound];
    for (p, &l) in lm.labels().iter().enumerate() {
        if l == UNASSIGNED {
            continue;
        }
        let (x, y) = (p % w, p / w);
        let l = l as usize;
        count[l] += 1;
        sum[l][0] += x as f64;
        sum[l][1] += y as f64;
        match &mut bbox[l] {
            Some(b) => b.include(x, y),
            slot => *slot = Some(BBox::point(x, y)),
        }
    }
    let mean: Vec<Vec2> = sum
        .iter()
        .zip(&count)
        .map(|(s, &n)| if n == 0 { [0.0; 2] } else { [s[0] / n as f64, s[1] / n as f64] })
        .collect();

    let mut second = vec![[0.0f64; 3]; bound];
    for (p, &l) in lm.labels().iter().enumerate() {
        if l == UNASSIGNED {
            continue;
        }
        let l = l as usize;
        let dx = (p % w) as f64 - mean[l][0];
        let dy = (p / w) as f64 - mean[l][1];
        second[l][0] += dx * dx;
        second[l][1] += dx * dy;
        second[l][2] += dy * dy;
    }

    (0..bound)
        .filter(|&l| count[l] > 0)
        .map(|l| {
            let n = count[l] as f64;
            let raw = Mat2::symmetric(second[l][0] / n, second[l][1] / n, second[l][2] / n);
            ComponentStats {
                label: l as i32,
                center: mean[l],
                covariance: raw.add_scaled_identity(eps),
                area: count[l],
                bbox: bbox[l].expect("non-empty label has a bounding box"),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_block() {
        let lm = LabelMap::from_labels(3, 3, vec![0, 0, 1, 0, 0, 1, 1, 1, 1]).unwrap();
        let stats = compute_stats_with(&lm, 0.0);
        assert_eq!(stats.len(), 2);
        assert_eq!(stats[0].center, [0.5, 0.5]);
        assert_eq!(stats[0].covariance, Mat2::diag(0.25, 0.25));
        assert_eq!(stats[0].area, 4);
        assert_eq!(
            stats[0].bbox,
            BBox {
                min_x: 0,
                min_y: 0,
                max_x: 1,
                max_y: 1
            }
        );
    }

    #[test]
    fn singleton_is_regularized() {
        let mut labels = vec![0; 80];
        labels[7 * 10 + 5] = 1;
        let lm = LabelMap::from_labels(10, 8, labels).unwrap();
        let stats = compute_stats(&lm);
        assert_eq!(stats[1].center, [5.0, 7.0]);
        assert_eq!(stats[1].covariance, Mat2::diag(0.25, 0.25));
        assert_eq!(stats[1].area, 1);
    }

    #[test]
    fn regularization_examples() {
        assert_eq!(regularize_covariance(Mat2::ZERO, 0.25).unwrap(), Mat2::diag(0.25, 0.25));
        assert_eq!(regularize_covariance(Mat2::diag(4.0, 1.0), 0.25).unwrap(), Mat2::diag(4.25, 1.25));
        assert!(regularize_covariance(Mat2::new(1.0, 0.3, 0.2, 1.0), 0.25).is_err());
    }

    #[test]
    fn skips_empty_labels() {
        let lm = LabelMap::from_labels(2, 1, vec![0, 3]).unwrap();
        let labels: Vec<i32> = compute_stats(&lm).iter().map(|s| s.label).collect();
        assert_eq!(labels, vec![0, 3]);
    }

    /// Naive two-pass reference over explicit per-label pixel lists.
    fn naive(lm: &LabelMap, label: i32) -> (Vec2, [f64; 3]) {
        let pts: Vec<(f64, f64)> = lm
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(p, _)| ((p % lm.width()) as f64, (p / lm.width()) as f64))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let cxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>() / n;
        let cxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
        let cyy = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum::<f64>() / n;
        ([mx, my], [cxx, cxy, cyy])
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    proptest! {
        #[test]
        fn matches_naive_reference(labels in prop::collection::vec(0i32..7, 256)) {
            let lm = LabelMap::from_labels(16, 16, labels).unwrap();
            let stats = compute_stats_with(&lm, 0.0);
            prop_assert_eq!(stats.iter().map(|s| s.area).sum::<usize>(), 256);
            for s in &stats {
                let (c, cov) = naive(&lm, s.label);
                prop_assert!(close(s.center[0], c[0]) && close(s.center[1], c[1]));
                prop_assert!(close(s.covariance.get(0, 0), cov[0]));
                prop_assert!(close(s.covariance.get(0, 1), cov[1]));
                prop_assert!(close(s.covariance.get(1, 1), cov[2]));
                for (p, &l) in lm.labels().iter().enumerate() {
                    if l == s.label {
                        prop_assert!(s.bbox.contains(p % 16, p / 16));
                    }
                }
            }
            for s in compute_stats(&lm) {
                prop_assert!(s.covariance.det() > 0.0);
                prop_assert!(s.covariance.is_symmetric(0.0));
                prop_assert!(s.covariance.symmetric_eigenvalues()[0] >= DEFAULT_COVARIANCE_EPS - 1e-12);
            }
        }

        #[test]
        fn translation_equivariant(labels in prop::collection::vec(0i32..4, 64), tx in 0usize..5, ty in 0usize..5) {
            // Embed the 8×8 map at offset (tx, ty) in a 13×13 map whose
            // padding carries a label of its own.
            let lm = LabelMap::from_labels(8, 8, labels.clone()).unwrap();
            let mut big = vec![9; 169];
            for p in 0..64 {
                big[(p / 8 + ty) * 13 + p % 8 + tx] = labels[p];
            }
            let shifted = LabelMap::from_labels(13, 13, big).unwrap();
            let a = compute_stats(&lm);
            let b: Vec<_> = compute_stats(&shifted).into_iter().filter(|s| s.label != 9).collect();
            prop_assert_eq!(a.len(), b.len());
            for (s, t) in a.iter().zip(&b) {
                prop_assert!(close(s.center[0] + tx as f64, t.center[0]));
                prop_assert!(close(s.center[1] + ty as f64, t.center[1]));
                for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                    prop_assert!((s.covariance.get(i, j) - t.covariance.get(i, j)).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn order_independent(labels in prop::collection::vec(0i32..5, 60)) {
            // Column-major traversal of a 10×6 map is row-major traversal of its transpose.
            let lm = LabelMap::from_labels(10, 6, labels.clone()).unwrap();
            let transposed: Vec<i32> = (0..60).map(|q| labels[(q % 6) * 10 + q / 6]).collect();
            let tm = LabelMap::from_labels(6, 10, transposed).unwrap();
            for (s, t) in compute_stats(&lm).iter().zip(compute_stats(&tm).iter()) {
                prop_assert!(close(s.center[0], t.center[1]) && close(s.center[1], t.center[0]));
                prop_assert!(close(s.covariance.get(0, 0), t.covariance.get(1, 1)));
                prop_assert!(close(s.covariance.get(0, 1), t.covariance.get(1, 0)));
                prop_assert_eq!(s.area, t.area);
            }
        }
    }
}
