// Optimal Power-SLIC: solves the balanced assignment, then checks that the
// diagram built from the dual potentials reproduces the assignment.

use powerslic::image::rgb_to_lab;
use powerslic::optimal::{optimal_power_slic, verify_induction};
use powerslic::synthetic::random_regions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scene = random_regions(48, 36, 4, 2);
    let out = optimal_power_slic(&rgb_to_lab(&scene.image), 12, 10.0)?;
    let inst = &out.instance;
    println!("{} cells, {} arcs, {} repair rounds", out.diagram.len(), inst.arcs().len(), out.repair_rounds);
    println!(
        "primal {} = dual {} (scaled)",
        out.solution.objective,
        out.solution.duals.objective(inst)
    );
    let report = verify_induction(&out.solution.assignment, &out.diagram, inst, 1e-6);
    println!("induction: {report:?}");
    assert!(report.holds());
    for (i, cell) in out.diagram.cells().iter().enumerate().take(3) {
        println!("cell {i}: site {:?} weight {:.3}", cell.site(), cell.weight());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
