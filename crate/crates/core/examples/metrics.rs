// Boundary recall, precision and compactness for a hand-made label map.

use powerslic::metrics::{evaluate, extract_boundaries, BoundaryMap, DEFAULT_TOLERANCE};
use powerslic::LabelMap;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Four 10×10 tiles; the ground truth only knows the vertical split.
    let tiles = LabelMap::from_labels(20, 20, (0..400).map(|p| p / 20 / 10 * 2 + p % 20 / 10).collect())?;
    let mut gt = BoundaryMap::empty(20, 20);
    for y in 0..20 {
        gt.set(9, y, true);
        gt.set(10, y, true);
    }
    let r = evaluate(&tiles, &[gt], DEFAULT_TOLERANCE)?;
    println!("boundary pixels: {}", extract_boundaries(&tiles).count());
    println!("br={:.3} bp={:.3} co={:.4} (tp {}, fp {}, fn {})", r.br, r.bp, r.co, r.tp, r.fp, r.fn_);
    for s in &r.per_superpixel {
        println!("label {}: area {} boundary {} Q {:.4}", s.label, s.area, s.boundary, s.quotient);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
