// Boundary recall of SLIC and Power-SLIC on a two-region image as the
// noise level rises.

use powerslic::bench::{segment, Method, SegmentConfig};
use powerslic::image::{add_gaussian_noise, NoiseSpec};
use powerslic::metrics::{evaluate, DEFAULT_TOLERANCE};
use powerslic::synthetic::two_region;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scene = two_region(120, 120);
    let gt = [scene.ground_truth()];
    for sigma2 in [0.0, 0.01, 0.1] {
        let noisy = add_gaussian_noise(&scene.image, NoiseSpec::new(sigma2, 5)?);
        for method in [Method::Slic, Method::Power] {
            let seg = segment(&noisy, &SegmentConfig::new(method, 80))?;
            let r = evaluate(&seg.labels, &gt, DEFAULT_TOLERANCE)?;
            println!("σ²={sigma2:<5} {method:>5}: br={:.3} co={:.3} k_out={}", r.br, r.co, seg.k_out);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
