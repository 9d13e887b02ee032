//! Generalized balanced power diagrams (GBPDs) in the plane.
//!
//! A diagram is a list of cells `(s_i, A_i, μ_i)`: a site, a symmetric
//! positive definite matrix defining a local ellipsoidal norm, and an additive
//! weight. A point belongs to the cell minimizing its power
//! `‖x − s_i‖²_{A_i} − μ_i`, so cell boundaries are conics. With every
//! `A_i = I` the diagram is a power diagram, and with equal weights on top of
//! that a Voronoi diagram.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Deserialize;

use crate::components::disconnected_label_count;
use crate::error::{Error, Result};
use crate::geometry::{sub, Mat2, Vec2};
use crate::image::LabImage;
use crate::labels::{LabelMap, UNASSIGNED};
use crate::slic::{run_assignment, window_radius, window_range, SlicParams, SlicState};
use crate::stats::{compute_stats, ComponentStats};

/// `(x − s)ᵀ A (x − s)`.
#[inline]
pub fn mahalanobis_sq(x: Vec2, s: Vec2, a: &Mat2) -> f64 {
    a.quad_form(sub(x, s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramCell {
    site: Vec2,
    matrix: Mat2,
    weight: f64,
}

impl DiagramCell {
    /// Rejects matrices that are not symmetric positive definite.
    pub fn new(site: Vec2, matrix: Mat2, weight: f64) -> Result<Self> {
        if !site.iter().all(|v| v.is_finite()) || !weight.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cell parameters must be finite: site {site:?}, weight {weight}"
            )));
        }
        Ok(DiagramCell {
            site,
            matrix: matrix.into_spd()?,
            weight,
        })
    }

    pub fn site(&self) -> Vec2 {
        self.site
    }

    pub fn matrix(&self) -> Mat2 {
        self.matrix
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// `‖x − s‖²_A − μ`.
#[inline]
pub fn cell_power(x: Vec2, cell: &DiagramCell) -> f64 {
    mahalanobis_sq(x, cell.site, &cell.matrix) - cell.weight
}

/// `μ = κ / (π √det Σ)`: the weight for which the ellipse
/// `{x : ‖x‖²_{Σ⁻¹} ≤ μ}` has area κ.
pub fn heuristic_mu(area: f64, sigma: &Mat2) -> Result<f64> {
    let det = sigma.det();
    if !(det > 0.0) {
        return Err(Error::NotPositiveDefinite(sigma.0));
    }
    Ok(area / (std::f64::consts::PI * det.sqrt()))
}

/// Coefficients of `xᵀQx + bᵀx + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadric {
    pub quadratic: Mat2,
    pub linear: Vec2,
    pub constant: f64,
}

impl Quadric {
    pub fn eval(&self, x: Vec2) -> f64 {
        self.quadratic.quad_form(x) + self.linear[0] * x[0] + self.linear[1] * x[1] + self.constant
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    cells: Vec<DiagramCell>,
    ref_width: usize,
    ref_height: usize,
}

impl Diagram {
    pub fn new(cells: Vec<DiagramCell>, ref_width: usize, ref_height: usize) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidParameter("a diagram needs at least one cell".into()));
        }
        Ok(Diagram {
            cells,
            ref_width,
            ref_height,
        })
    }

    pub fn cells(&self) -> &[DiagramCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn ref_width(&self) -> usize {
        self.ref_width
    }

    pub fn ref_height(&self) -> usize {
        self.ref_height
    }

    /// Index of the cell of minimal power at `x`; ties go to the lowest index.
    pub fn locate(&self, x: Vec2) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, c) in self.cells.iter().enumerate() {
            let p = cell_power(x, c);
            if p < best.0 {
                best = (p, i);
            }
        }
        best.1
    }

    /// Labels every pixel `(x, y)` of a `width × height` raster with
    /// `locate([x, y])`.
    pub fn rasterize(&self, width: usize, height: usize) -> LabelMap {
        let mut labels = vec![0i32; width * height];
        if width > 0 {
            labels.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
                for (x, l) in row.iter_mut().enumerate() {
                    *l = self.locate([x as f64, y as f64]) as i32;
                }
            });
        }
        LabelMap::from_labels(width, height, labels).expect("labels match raster size")
    }

    /// Maps the diagram through `x ↦ f·x`: sites scale by `f`, weights by
    /// `f²`, matrices are unchanged. Every power scales by `f²`, so
    /// `locate(rescale(d, f), f·x) = locate(d, x)`.
    pub fn rescale(&self, f: f64) -> Result<Diagram> {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {f}")));
        }
        Ok(Diagram {
            cells: self
                .cells
                .iter()
                .map(|c| DiagramCell {
                    site: [c.site[0] * f, c.site[1] * f],
                    matrix: c.matrix,
                    weight: c.weight * f * f,
                })
                .collect(),
            ref_width: (self.ref_width as f64 * f).round() as usize,
            ref_height: (self.ref_height as f64 * f).round() as usize,
        })
    }

    /// Adds `shift` to every weight; cell membership is unchanged.
    pub fn shift_weights(&self, shift: f64) -> Diagram {
        let mut d = self.clone();
        for c in &mut d.cells {
            c.weight += shift;
        }
        d
    }

    /// `cell_power(x, i) − cell_power(x, l)` as an explicit quadric. The
    /// boundary between cells `i` and `l` is its zero set.
    pub fn separator(&self, i: usize, l: usize) -> Quadric {
        let (ci, cl) = (&self.cells[i], &self.cells[l]);
        let a_s = |c: &DiagramCell| {
            let [[a, b], [cc, d]] = c.matrix.0;
            [a * c.site[0] + b * c.site[1], cc * c.site[0] + d * c.site[1]]
        };
        let (ai, al) = (a_s(ci), a_s(cl));
        let [[a0, b0], [c0, d0]] = ci.matrix.0;
        let [[a1, b1], [c1, d1]] = cl.matrix.0;
        Quadric {
            quadratic: Mat2::new(a0 - a1, b0 - b1, c0 - c1, d0 - d1),
            linear: [-2.0 * (ai[0] - al[0]), -2.0 * (ai[1] - al[1])],
            constant: (ci.matrix.quad_form(ci.site) - ci.weight) - (cl.matrix.quad_form(cl.site) - cl.weight),
        }
    }

    /// JSON text with every number written to 17 significant digits.
    pub fn to_json(&self) -> String {
        fn num(v: f64) -> String {
            format!("{v:.16e}")
        }
        let mut out = String::new();
        let _ = write!(
            out,
            "{{\"ref_width\":{},\"ref_height\":{},\"cells\":[",
            self.ref_width, self.ref_height
        );
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let [[a, b], [cc, d]] = c.matrix.0;
            let _ = write!(
                out,
                "\n{{\"site\":[{},{}],\"matrix\":[[{},{}],[{},{}]],\"mu\":{}}}",
                num(c.site[0]),
                num(c.site[1]),
                num(a),
                num(b),
                num(cc),
                num(d),
                num(c.weight)
            );
        }
        out.push_str("\n]}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Diagram> {
        #[derive(Deserialize)]
        struct RawCell {
            site: [f64; 2],
            matrix: [[f64; 2]; 2],
            mu: f64,
        }
        #[derive(Deserialize)]
        struct RawDiagram {
            ref_width: usize,
            ref_height: usize,
            cells: Vec<RawCell>,
        }
        let raw: RawDiagram = serde_json::from_str(text).map_err(|e| Error::parse("diagram", e.to_string()))?;
        let cells = raw
            .cells
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                DiagramCell::new(c.site, Mat2(c.matrix), c.mu)
                    .map_err(|e| Error::parse("diagram", format!("cell {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Diagram::new(cells, raw.ref_width, raw.ref_height).map_err(|e| Error::parse("diagram", e.to_string()))
    }
}

/// Builds the heuristic diagram: `s_i = x_{c_i}`, `A_i = Σ_i⁻¹`,
/// `μ_i = κ_i / (π √det Σ_i)`.
pub fn heuristic_diagram(stats: &[ComponentStats], width: usize, height: usize) -> Result<Diagram> {
    let cells = stats
        .iter()
        .map(|s| {
            let inverse = s.covariance.inverse().ok_or(Error::NotPositiveDefinite(s.covariance.0))?;
            DiagramCell::new(s.center, inverse, heuristic_mu(s.area as f64, &s.covariance)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Diagram::new(cells, width, height)
}

#[derive(Debug, Clone)]
pub struct PowerAssignment {
    /// Labels are cell indices, i.e. positions in the `stats` slice.
    pub labels: LabelMap,
    pub diagram: Diagram,
    /// Pixels left unassigned by the windowed pass and placed by `locate`.
    pub cleaned: usize,
}

/// Final assignment of Power-SLIC.
///
/// Each cell claims the pixels of the `2h × 2h` window around its site by
/// strict-minimum anisotropic distance `‖x − s_i‖²_{A_i}` (cells in index
/// order, so ties favour the lower index). With `power_offset` the full cell
/// power including `−μ_i` is used instead. Pixels no window reached are then
/// placed with [`Diagram::locate`].
pub fn power_slic_assign(
    width: usize,
    height: usize,
    stats: &[ComponentStats],
    h: f64,
    power_offset: bool,
) -> Result<PowerAssignment> {
    let diagram = heuristic_diagram(stats, width, height)?;
    let mut lm = LabelMap::unassigned(width, height);
    let radius = window_radius(h);
    for (i, cell) in diagram.cells.iter().enumerate() {
        let offset = if power_offset { cell.weight } else { 0.0 };
        let (x0, x1) = window_range(cell.site[0], radius, width);
        let (y0, y1) = window_range(cell.site[1], radius, height);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let p = y * width + x;
                let d = mahalanobis_sq([x as f64, y as f64], cell.site, &cell.matrix) - offset;
                if d < lm.dist()[p] {
                    lm.set(p, i as i32, d);
                }
            }
        }
    }
    let mut cleaned = 0;
    for p in 0..lm.len() {
        if lm.labels()[p] == UNASSIGNED {
            let x = [(p % width) as f64, (p / width) as f64];
            let i = diagram.locate(x);
            lm.set(p, i as i32, cell_power(x, &diagram.cells[i]));
            cleaned += 1;
        }
    }
    Ok(PowerAssignment {
        labels: lm,
        diagram,
        cleaned,
    })
}

#[derive(Debug, Clone)]
pub struct PowerSlicOutput {
    pub labels: LabelMap,
    pub diagram: Diagram,
    pub slic: SlicState,
    pub cleaned: usize,
    /// Cells whose pixels are not 4-connected.
    pub disconnected_cells: usize,
}

/// SLIC's assignment phase followed by the Power-SLIC final assignment.
pub fn power_slic(img: &LabImage, params: &SlicParams, power_offset: bool) -> Result<PowerSlicOutput> {
    let (lm, slic) = run_assignment(img, params)?;
    let stats = compute_stats(&lm);
    let out = power_slic_assign(img.width(), img.height(), &stats, slic.spacing, power_offset)?;
    Ok(PowerSlicOutput {
        disconnected_cells: disconnected_label_count(&out.labels),
        labels: out.labels,
        diagram: out.diagram,
        slic,
        cleaned: out.cleaned,
    })
}
