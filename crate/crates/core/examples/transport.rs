// A small balanced transportation problem solved directly, with its dual
// certificate.

use powerslic::optimal::{build_instance_for_sites, solve_balanced_assignment, SiteSpec, TransportInstance};
use powerslic::stats::BBox;
use powerslic::Mat2;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let full = BBox {
        min_x: 0,
        min_y: 0,
        max_x: 5,
        max_y: 1,
    };
    let sites = [
        SiteSpec {
            center: [1.0, 0.5],
            matrix: Mat2::diag(1.0, 1.0),
            supply: 7,
            window: full,
        },
        SiteSpec {
            center: [2.0, 0.5],
            matrix: Mat2::diag(0.25, 1.0),
            supply: 5,
            window: full,
        },
    ];
    let inst = build_instance_for_sites(&sites, 6, 2)?;
    let sol = solve_balanced_assignment(&inst)?;
    for row in sol.assignment.chunks(6) {
        println!("{row:?}");
    }
    println!("objective {:.4}", inst.unscale(sol.objective));
    println!("λ = {:?}", sol.duals.site_potentials.iter().map(|&l| inst.unscale(l)).collect::<Vec<_>>());

    // The same instance through the plain-text format.
    let again = TransportInstance::from_text(&inst.to_text())?;
    assert_eq!(solve_balanced_assignment(&again)?.objective, sol.objective);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
