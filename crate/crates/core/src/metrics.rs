//! Boundary recall, boundary precision and compactness.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::labels::LabelMap;

/// Default Chebyshev tolerance for boundary matching.
pub const DEFAULT_TOLERANCE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BoundaryMap {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: bits.len(),
            });
        }
        Ok(BoundaryMap { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        BoundaryMap {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pixels within Chebyshev distance `r` of a set pixel. The square
    /// structuring element is separable, so rows then columns are dilated.
    pub fn dilate(&self, r: usize) -> BoundaryMap {
        let (w, h) = (self.width, self.height);
        let mut rows = vec![false; w * h];
        for y in 0..h {
            let row = &self.bits[y * w..(y + 1) * w];
            for x in 0..w {
                let lo = x.saturating_sub(r);
                let hi = (x + r).min(w - 1);
                rows[y * w + x] = row[lo..=hi].iter().any(|&b| b);
            }
        }
        let mut bits = vec![false; w * h];
        for y in 0..h {
            let lo = y.saturating_sub(r);
            let hi = (y + r).min(h - 1);
            for x in 0..w {
                bits[y * w + x] = (lo..=hi).any(|yy| rows[yy * w + x]);
            }
        }
        BoundaryMap { width: w, height: h, bits }
    }
}

/// A pixel is a boundary pixel if it lies on the image border or a
/// 4-neighbour carries another label.
pub fn extract_boundaries(lm: &LabelMap) -> BoundaryMap {
    let (w, h) = (lm.width(), lm.height());
    let labels = lm.labels();
    let bits = (0..w * h)
        .map(|p| {
            let (x, y) = (p % w, p / w);
            if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                return true;
            }
            let l = labels[p];
            labels[p - 1] != l || labels[p + 1] != l || labels[p - w] != l || labels[p + w] != l
        })
        .collect();
    BoundaryMap { width: w, height: h, bits }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryScore {
    pub br: f64,
    pub bp: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// Recall counts ground-truth pixels with a segmentation boundary within
/// Chebyshev distance `tol`; precision counts segmentation pixels with a
/// ground-truth boundary within `tol`.
pub fn boundary_recall_precision(seg: &BoundaryMap, gt: &BoundaryMap, tol: usize) -> Result<BoundaryScore> {
    if (seg.width, seg.height) != (gt.width, gt.height) {
        return Err(Error::DimensionMismatch {
            expected: gt.bits.len(),
            actual: seg.bits.len(),
        });
    }
    let near_seg = seg.dilate(tol);
    let near_gt = gt.dilate(tol);
    let mut tp = 0;
    let mut fn_ = 0;
    let mut fp = 0;
    let mut matched_seg = 0;
    for p in 0..gt.bits.len() {
        if gt.bits[p] {
            if near_seg.bits[p] {
                tp += 1;
            } else {
                fn_ += 1;
            }
        }
        if seg.bits[p] {
            if near_gt.bits[p] {
                matched_seg += 1;
            } else {
                fp += 1;
            }
        }
    }
    let br = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
    // Precision uses matched segmentation pixels, which need not equal the
    // matched ground-truth count when the two boundaries differ in density.
    let bp = if matched_seg + fp == 0 {
        1.0
    } else {
        matched_seg as f64 / (matched_seg + fp) as f64
    };
    Ok(BoundaryScore { br, bp, tp, fp, fn_ })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpixelShape {
    pub label: i32,
    pub area: usize,
    pub boundary: usize,
    /// `4πκ / b²`; exceeds 1 for very small regions.
    pub quotient: f64,
}

/// Area-weighted mean iso-perimetric quotient and per-label breakdown in
/// ascending label order.
pub fn compactness(lm: &LabelMap) -> Result<(f64, Vec<SuperpixelShape>)> {
    lm.require_total()?;
    let boundaries = extract_boundaries(lm);
    let bound = lm.label_bound();
    let mut area = vec![0usize; bound];
    let mut boundary = vec![0usize; bound];
    for (&l, &b) in lm.labels().iter().zip(&boundaries.bits) {
        area[l as usize] += 1;
        boundary[l as usize] += b as usize;
    }
    let n = lm.len() as f64;
    let shapes: Vec<SuperpixelShape> = (0..bound)
        .filter(|&l| area[l] > 0)
        .map(|l| SuperpixelShape {
            label: l as i32,
            area: area[l],
            boundary: boundary[l],
            quotient: 4.0 * PI * area[l] as f64 / (boundary[l] as f64).powi(2),
        })
        .collect();
    let co = shapes.iter().map(|s| s.quotient * s.area as f64 / n).sum();
    Ok((co, shapes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsResult {
    /// Mean over ground-truth maps.
    pub br: f64,
    /// Mean over ground-truth maps.
    pub bp: f64,
    pub co: f64,
    /// Summed over ground-truth maps.
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub per_superpixel: Vec<SuperpixelShape>,
}

/// Scores a segmentation against any number of ground-truth boundary maps.
/// With none, `br` and `bp` are NaN.
pub fn evaluate(lm: &LabelMap, gts: &[BoundaryMap], tol: usize) -> Result<MetricsResult> {
    let (co, per_superpixel) = compactness(lm)?;
    let seg = extract_boundaries(lm);
    let mut out = MetricsResult {
        br: 0.0,
        bp: 0.0,
        co,
        tp: 0,
        fp: 0,
        fn_: 0,
        per_superpixel,
    };
    for gt in gts {
        let s = boundary_recall_precision(&seg, gt, tol)?;
        out.br += s.br;
        out.bp += s.bp;
        out.tp += s.tp;
        out.fp += s.fp;
        out.fn_ += s.fn_;
    }
    out.br /= gts.len() as f64;
    out.bp /= gts.len() as f64;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn column(x0: usize) -> BoundaryMap {
        let mut b = BoundaryMap::empty(10, 10);
        for y in 0..10 {
            b.set(x0, y, true);
        }
        b
    }

    #[test]
    fn single_label_ring() {
        let lm = LabelMap::from_labels(10, 10, vec![0; 100]).unwrap();
        assert_eq!(extract_boundaries(&lm).count(), 36);
        let (co, shapes) = compactness(&lm).unwrap();
        assert_eq!(shapes[0].boundary, 36);
        assert!((co - 0.9696).abs() < 1e-3);
        assert!((co - 400.0 * PI / 1296.0).abs() < 1e-12);
    }

    #[test]
    fn four_by_four_split_is_all_boundary() {
        let labels = (0..16).map(|p| (p % 4 >= 2) as i32).collect();
        let lm = LabelMap::from_labels(4, 4, labels).unwrap();
        assert_eq!(extract_boundaries(&lm).count(), 16);
    }

    #[test]
    fn checkerboard_is_all_boundary() {
        let labels = (0..64).map(|p| (p % 8 + p / 8) % 2).collect();
        let lm = LabelMap::from_labels(8, 8, labels).unwrap();
        assert_eq!(extract_boundaries(&lm).count(), 64);
    }

    #[test]
    fn single_pixel_quotient() {
        let lm = LabelMap::from_labels(1, 1, vec![0]).unwrap();
        let (co, shapes) = compactness(&lm).unwrap();
        assert!((shapes[0].quotient - 4.0 * PI).abs() < 1e-9);
        assert!((co - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn halves() {
        let labels = (0..100).map(|p| (p % 10 >= 5) as i32).collect();
        let lm = LabelMap::from_labels(10, 10, labels).unwrap();
        let (co, shapes) = compactness(&lm).unwrap();
        assert!(shapes.iter().all(|s| s.area == 50 && s.boundary == 26));
        assert!((co - 200.0 * PI / 676.0).abs() < 1e-12);
    }

    #[test]
    fn column_tolerance_examples() {
        let s = boundary_recall_precision(&column(7), &column(5), 2).unwrap();
        assert_eq!((s.br, s.bp), (1.0, 1.0));
        let s = boundary_recall_precision(&column(8), &column(5), 2).unwrap();
        assert_eq!((s.br, s.bp), (0.0, 0.0));
        assert_eq!((s.tp, s.fp, s.fn_), (0, 10, 10));
    }

    #[test]
    fn empty_conventions() {
        let s = boundary_recall_precision(&column(3), &BoundaryMap::empty(10, 10), 2).unwrap();
        assert_eq!((s.br, s.bp), (1.0, 0.0));
        let s = boundary_recall_precision(&BoundaryMap::empty(10, 10), &column(3), 2).unwrap();
        assert_eq!((s.br, s.bp), (0.0, 1.0));
    }

    #[test]
    fn rejects_mismatch() {
        assert!(boundary_recall_precision(&BoundaryMap::empty(3, 3), &BoundaryMap::empty(3, 4), 2).is_err());
    }

    #[test]
    fn averages_over_ground_truths() {
        let labels = (0..100).map(|p| (p % 10 >= 5) as i32).collect();
        let lm = LabelMap::from_labels(10, 10, labels).unwrap();
        let seg = extract_boundaries(&lm);
        let r = evaluate(&lm, &[seg.clone(), BoundaryMap::empty(10, 10)], 2).unwrap();
        assert_eq!(r.br, 1.0);
        assert_eq!(r.bp, 0.5);
        assert_eq!(r.fp, seg.count());
    }

    /// Direct Chebyshev search, one pixel at a time.
    fn naive(seg: &BoundaryMap, gt: &BoundaryMap, tol: usize) -> (usize, usize, usize) {
        let near = |m: &BoundaryMap, x: usize, y: usize| {
            (0..m.height).any(|yy| (0..m.width).any(|xx| m.get(xx, yy) && xx.abs_diff(x) <= tol && yy.abs_diff(y) <= tol))
        };
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for y in 0..gt.height {
            for x in 0..gt.width {
                if gt.get(x, y) {
                    if near(seg, x, y) { tp += 1 } else { fn_ += 1 }
                }
                if seg.get(x, y) && !near(gt, x, y) {
                    fp += 1;
                }
            }
        }
        (tp, fp, fn_)
    }

    proptest! {
        #[test]
        fn matches_naive_search(a in prop::collection::vec(prop::bool::weighted(0.15), 120),
                                b in prop::collection::vec(prop::bool::weighted(0.15), 120),
                                tol in 0usize..4) {
            let seg = BoundaryMap::new(12, 10, a).unwrap();
            let gt = BoundaryMap::new(12, 10, b).unwrap();
            let s = boundary_recall_precision(&seg, &gt, tol).unwrap();
            prop_assert_eq!((s.tp, s.fp, s.fn_), naive(&seg, &gt, tol));
            prop_assert!((0.0..=1.0).contains(&s.br) && (0.0..=1.0).contains(&s.bp));
            prop_assert_eq!(s.tp + s.fn_, gt.count());
            let wider = boundary_recall_precision(&seg, &gt, tol + 1).unwrap();
            prop_assert!(wider.br >= s.br && wider.bp >= s.bp);
        }

        #[test]
        fn permutation_invariant(labels in prop::collection::vec(0i32..5, 80), shift in 1i32..5) {
            let lm = LabelMap::from_labels(10, 8, labels.clone()).unwrap();
            let permuted = LabelMap::from_labels(10, 8, labels.iter().map(|l| (l + shift) % 5).collect()).unwrap();
            let gt = extract_boundaries(&LabelMap::from_labels(10, 8, (0..80).map(|p| (p % 10 >= 4) as i32).collect()).unwrap());
            let a = evaluate(&lm, std::slice::from_ref(&gt), 2).unwrap();
            let b = evaluate(&permuted, &[gt], 2).unwrap();
            prop_assert_eq!((a.br, a.bp), (b.br, b.bp));
            prop_assert!((a.co - b.co).abs() < 1e-12);
            prop_assert!(a.co > 0.0);
            prop_assert_eq!(a.per_superpixel.iter().map(|s| s.area).sum::<usize>(), 80);
        }

        #[test]
        fn whole_image_formula(w in 1usize..30, h in 1usize..30) {
            let lm = LabelMap::from_labels(w, h, vec![0; w * h]).unwrap();
            let (co, _) = compactness(&lm).unwrap();
            let b = if w == 1 || h == 1 { w * h } else { 2 * w + 2 * h - 4 };
            let expected = 4.0 * PI * (w * h) as f64 / (b * b) as f64;
            prop_assert!((co - expected).abs() < 1e-12 * expected);
        }
    }
}
