use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub const UNASSIGNED: i32 = -1;

/// Per-pixel superpixel labels plus the squared distance that won each pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<i32>,
    dist: Vec<f64>,
}

impl LabelMap {
    /// Every pixel at label −1 and distance +∞.
    pub fn unassigned(width: usize, height: usize) -> Self {
        LabelMap {
            width,
            height,
            labels: vec![UNASSIGNED; width * height],
            dist: vec![f64::INFINITY; width * height],
        }
    }

    /// Wraps explicit labels; distances are set to zero for assigned pixels.
    pub fn from_labels(width: usize, height: usize, labels: Vec<i32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l < UNASSIGNED) {
            return Err(Error::InvalidParameter(format!("label {bad} is negative")));
        }
        let dist = labels
            .iter()
            .map(|&l| if l == UNASSIGNED { f64::INFINITY } else { 0.0 })
            .collect();
        Ok(LabelMap {
            width,
            height,
            labels,
            dist,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    pub fn dist(&self) -> &[f64] {
        &self.dist
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> i32 {
        self.labels[y * self.width + x]
    }

    #[inline]
    pub(crate) fn set(&mut self, index: usize, label: i32, dist: f64) {
        self.labels[index] = label;
        self.dist[index] = dist;
    }

    pub(crate) fn reset(&mut self) {
        self.labels.fill(UNASSIGNED);
        self.dist.fill(f64::INFINITY);
    }

    pub fn unassigned_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == UNASSIGNED).count()
    }

    pub fn is_total(&self) -> bool {
        self.unassigned_count() == 0
    }

    pub(crate) fn require_total(&self) -> Result<()> {
        match self.unassigned_count() {
            0 => Ok(()),
            n => Err(Error::Unassigned(n)),
        }
    }

    /// Distinct labels in use, ascending.
    pub fn distinct_labels(&self) -> BTreeSet<i32> {
        self.labels.iter().copied().filter(|&l| l != UNASSIGNED).collect()
    }

    pub fn num_labels_used(&self) -> usize {
        self.distinct_labels().len()
    }

    /// Largest label plus one (0 for an empty or fully unassigned map).
    pub fn label_bound(&self) -> usize {
        self.labels.iter().map(|&l| (l + 1).max(0) as usize).max().unwrap_or(0)
    }
}
