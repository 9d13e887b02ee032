// Seeded Gaussian noise through the 8-bit PNG round trip.

use powerslic::image::{add_gaussian_noise, NoiseSpec};
use powerslic::synthetic::two_region;
use powerslic::io;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let clean = two_region(100, 100).image;
    let dir = std::env::temp_dir().join(format!("powerslic-noise-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for sigma2 in [0.0, 0.005, 0.05, 0.3] {
        let path = dir.join(format!("noisy-{sigma2}.png"));
        io::write_rgb(&path, &add_gaussian_noise(&clean, NoiseSpec::new(sigma2, 1)?))?;
        let back = io::read_rgb(&path)?;
        let changed = back
            .pixels()
            .iter()
            .zip(clean.pixels())
            .filter(|(a, b)| a.iter().zip(b.iter()).any(|(x, y)| io::quantize_8bit(*x) != io::quantize_8bit(*y)))
            .count();
        println!("σ²={sigma2:<5} changed {:.1}% of pixels", 100.0 * changed as f64 / back.len() as f64);
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
