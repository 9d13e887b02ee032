// Stores a Power-SLIC diagram and rasterizes it at three times the
// resolution, then checks the coarse grid against the original.

use powerslic::bench::upscale;
use powerslic::gbpd::power_slic;
use powerslic::image::rgb_to_lab;
use powerslic::synthetic::random_regions;
use powerslic::{io, SlicParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scene = random_regions(64, 48, 5, 9);
    let out = power_slic(&rgb_to_lab(&scene.image), &SlicParams::new(24, 10.0), false)?;

    let dir = std::env::temp_dir().join(format!("powerslic-upscale-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("diagram.json");
    io::write_diagram(&path, &out.diagram)?;
    let stored = io::read_diagram(&path)?;
    std::fs::remove_dir_all(&dir)?;

    let coarse = stored.rasterize(64, 48);
    let fine = upscale(&stored, 3.0)?;
    println!("{}x{} -> {}x{}", coarse.width(), coarse.height(), fine.width(), fine.height());
    let agree = (0..48).all(|y| (0..64).all(|x| fine.label(3 * x, 3 * y) == coarse.label(x, y)));
    println!("every third pixel matches the coarse raster: {agree}");
    assert!(agree);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
