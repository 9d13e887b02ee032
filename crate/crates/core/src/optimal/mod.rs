//! Optimal Power-SLIC: an exact balanced least-squares assignment whose site
//! potentials become the diagram weights.

mod exchange;
mod instance;
mod ssp;

pub use instance::{
    build_instance, build_instance_for_sites, scale_cost, sites_from_stats, Arc, SiteSpec, TransportInstance,
    COST_SCALE,
};

use log::debug;

use crate::components::disconnected_label_count;
use crate::error::{Error, Result};
use crate::gbpd::{cell_power, Diagram, DiagramCell};
use crate::image::LabImage;
use crate::labels::LabelMap;
use crate::slic::{run_assignment, SlicParams, SlicState};
use crate::stats::compute_stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// Cycle canceling from the instance's warm start when there is one,
    /// successive shortest paths otherwise.
    #[default]
    Auto,
    SuccessiveShortestPaths,
    /// Requires a warm start.
    CycleCanceling,
}

/// Potentials in scaled cost units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    /// λ_i
    pub site_potentials: Vec<i64>,
    /// η_j
    pub pixel_potentials: Vec<i64>,
}

impl DualSolution {
    /// `Σ κ_i λ_i + Σ η_j`
    pub fn objective(&self, inst: &TransportInstance) -> i128 {
        let sites: i128 = inst
            .supplies()
            .iter()
            .zip(&self.site_potentials)
            .map(|(&k, &l)| k as i128 * l as i128)
            .sum();
        sites + self.pixel_potentials.iter().map(|&e| e as i128).sum::<i128>()
    }

    /// Number of admitted arcs with `λ_i + η_j > cost(i, j)`.
    pub fn infeasible_arcs(&self, inst: &TransportInstance) -> usize {
        inst.arcs()
            .iter()
            .filter(|a| self.site_potentials[a.site as usize] + self.pixel_potentials[a.pixel as usize] > a.cost)
            .count()
    }

    /// Number of used arcs with `λ_i + η_j ≠ cost(i, j)`.
    pub fn slack_used_arcs(&self, inst: &TransportInstance, assignment: &[u32]) -> usize {
        assignment
            .iter()
            .enumerate()
            .filter(|&(j, &i)| {
                let cost = inst.cost(i as usize, j).expect("admitted arc");
                self.site_potentials[i as usize] + self.pixel_potentials[j] != cost
            })
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Site index per pixel.
    pub assignment: Vec<u32>,
    pub duals: DualSolution,
    /// Scaled objective.
    pub objective: i64,
}

pub fn solve_balanced_assignment(inst: &TransportInstance) -> Result<Solution> {
    solve_with(inst, Solver::Auto)
}

pub fn solve_with(inst: &TransportInstance, solver: Solver) -> Result<Solution> {
    let start = match (solver, inst.warm_start()) {
        (Solver::CycleCanceling, None) => {
            return Err(Error::InvalidParameter("cycle canceling needs a warm start".into()));
        }
        (Solver::CycleCanceling | Solver::Auto, Some(w)) => w.to_vec(),
        (Solver::SuccessiveShortestPaths, _) | (Solver::Auto, None) => ssp::solve(inst)?,
    };
    // On an optimal start this finds no negative cycle and only extracts duals.
    let (assignment, duals) = exchange::optimize(inst, start);
    Ok(Solution {
        objective: inst.objective(&assignment),
        assignment,
        duals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductionReport {
    /// Pixel/site pairs where the assigned cell loses by more than `tol`.
    pub violations: usize,
    /// Pairs where a competing cell is within `tol` of the assigned one.
    pub ties: usize,
    /// Largest `power(assigned) − power(competitor)` seen.
    pub worst_margin: f64,
    pub checked: usize,
}

impl InductionReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks that each pixel's assigned cell has minimal power among all sites
/// admitted for that pixel, using the diagram's unscaled float parameters.
pub fn verify_induction(assignment: &[u32], diagram: &Diagram, inst: &TransportInstance, tol: f64) -> InductionReport {
    let mut report = InductionReport {
        violations: 0,
        ties: 0,
        worst_margin: f64::NEG_INFINITY,
        checked: 0,
    };
    for (j, &i) in assignment.iter().enumerate() {
        let x = inst.position(j);
        let own = cell_power(x, &diagram.cells()[i as usize]);
        for l in inst.admitted_sites(j).filter(|&l| l != i as usize) {
            let margin = own - cell_power(x, &diagram.cells()[l]);
            report.checked += 1;
            report.worst_margin = report.worst_margin.max(margin);
            if margin > tol {
                report.violations += 1;
            } else if margin.abs() <= tol {
                report.ties += 1;
            }
        }
    }
    report
}

#[derive(Debug, Clone)]
pub struct OptimalOutput {
    /// Labels are site indices.
    pub labels: LabelMap,
    pub diagram: Diagram,
    pub instance: TransportInstance,
    pub solution: Solution,
    pub slic: SlicState,
    /// Window dilations needed before the instance became feasible; one
    /// more than the configured maximum means full arcs were used.
    pub repair_rounds: usize,
    pub disconnected_cells: usize,
}

pub const MAX_REPAIR_ROUNDS: usize = 3;

pub fn optimal_power_slic(img: &LabImage, k: usize, m: f64) -> Result<OptimalOutput> {
    optimal_power_slic_with(img, &SlicParams::new(k, m), Solver::Auto)
}

/// SLIC's assignment phase, then the exact balanced assignment of pixels to
/// the component means under the inverse component covariances.
pub fn optimal_power_slic_with(img: &LabImage, params: &SlicParams, solver: Solver) -> Result<OptimalOutput> {
    let (width, height) = (img.width(), img.height());
    let (lm, slic) = run_assignment(img, params)?;
    let stats = compute_stats(&lm);
    let mut sites = sites_from_stats(&stats)?;

    let mut index_of = vec![u32::MAX; lm.label_bound()];
    for (i, s) in stats.iter().enumerate() {
        index_of[s.label as usize] = i as u32;
    }
    let warm: Vec<u32> = lm.labels().iter().map(|&l| index_of[l as usize]).collect();
    let grow = slic.spacing.ceil() as usize;

    let mut round = 0;
    let (instance, solution) = loop {
        let inst = build_instance_for_sites(&sites, width, height)?;
        // The SLIC labels stay feasible as windows only grow.
        let inst = inst.with_warm_start(warm.clone())?;
        match solve_with(&inst, solver) {
            Ok(sol) => break (inst, sol),
            Err(Error::Infeasible { starved }) if round <= MAX_REPAIR_ROUNDS => {
                debug!("round {round}: {} starved sites, dilating windows", starved.len());
                round += 1;
                for s in &mut sites {
                    s.window = if round > MAX_REPAIR_ROUNDS {
                        crate::stats::BBox {
                            min_x: 0,
                            min_y: 0,
                            max_x: width - 1,
                            max_y: height - 1,
                        }
                    } else {
                        s.window.dilate(grow, width, height)
                    };
                }
            }
            Err(e) => return Err(e),
        }
    };

    let labels = LabelMap::from_labels(width, height, solution.assignment.iter().map(|&i| i as i32).collect())?;
    let cells = sites
        .iter()
        .zip(&solution.duals.site_potentials)
        .map(|(s, &lambda)| DiagramCell::new(s.center, s.matrix, instance.unscale(lambda)))
        .collect::<Result<Vec<_>>>()?;
    let diagram = Diagram::new(cells, width, height)?;
    Ok(OptimalOutput {
        disconnected_cells: disconnected_label_count(&labels),
        labels,
        diagram,
        instance,
        solution,
        slic,
        repair_rounds: round,
    })
}
