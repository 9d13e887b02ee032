use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gbpd::mahalanobis_sq;
use crate::geometry::{Mat2, Vec2};
use crate::stats::{BBox, ComponentStats};

/// Costs are stored as `round(cost · 2²⁰)`.
pub const COST_SCALE: f64 = (1u64 << 20) as f64;

pub fn scale_cost(cost: f64) -> i64 {
    (cost * COST_SCALE).round() as i64
}

/// An admitted site/pixel pair with its scaled cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub site: u32,
    pub pixel: u32,
    pub cost: i64,
}

/// Balanced transportation problem: site `i` must receive exactly
/// `supplies[i]` pixels, every pixel goes to exactly one admitted site, and
/// the summed arc cost is minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportInstance {
    num_sites: usize,
    num_pixels: usize,
    width: usize,
    scale: f64,
    supplies: Vec<u64>,
    /// Site-major, then pixel ascending.
    arcs: Vec<Arc>,
    pixel_offsets: Vec<usize>,
    /// Arc ids grouped by pixel, ascending site within each pixel.
    pixel_arcs: Vec<u32>,
    warm_start: Option<Vec<u32>>,
}

impl TransportInstance {
    /// Validates and indexes an arc list. Pixels are laid out row-major with
    /// the given raster `width`.
    pub fn from_arcs(
        num_sites: usize,
        num_pixels: usize,
        width: usize,
        supplies: Vec<u64>,
        mut arcs: Vec<Arc>,
        scale: f64,
    ) -> Result<Self> {
        if supplies.len() != num_sites {
            return Err(Error::InvalidParameter(format!(
                "{} supplies for {num_sites} sites",
                supplies.len()
            )));
        }
        let supplied: u64 = supplies.iter().sum();
        if supplied != num_pixels as u64 {
            return Err(Error::SupplyMismatch {
                supplied,
                pixels: num_pixels,
            });
        }
        if let Some(a) = arcs
            .iter()
            .find(|a| a.site as usize >= num_sites || a.pixel as usize >= num_pixels || a.cost < 0)
        {
            return Err(Error::InvalidParameter(format!("invalid arc {a:?}")));
        }
        arcs.sort_unstable_by_key(|a| (a.site, a.pixel));
        if arcs.windows(2).any(|w| (w[0].site, w[0].pixel) == (w[1].site, w[1].pixel)) {
            return Err(Error::InvalidParameter("duplicate arc".into()));
        }

        let mut degree = vec![0usize; num_pixels + 1];
        for a in &arcs {
            degree[a.pixel as usize + 1] += 1;
        }
        if let Some(p) = (0..num_pixels).find(|&p| degree[p + 1] == 0) {
            return Err(Error::PixelWithoutArc(p));
        }
        let mut pixel_offsets = degree;
        for p in 0..num_pixels {
            pixel_offsets[p + 1] += pixel_offsets[p];
        }
        let mut fill = pixel_offsets.clone();
        let mut pixel_arcs = vec![0u32; arcs.len()];
        // Arcs are site-major, so each pixel's list comes out in ascending site order.
        for (id, a) in arcs.iter().enumerate() {
            let slot = &mut fill[a.pixel as usize];
            pixel_arcs[*slot] = id as u32;
            *slot += 1;
        }
        Ok(TransportInstance {
            num_sites,
            num_pixels,
            width: width.max(1),
            scale,
            supplies,
            arcs,
            pixel_offsets,
            pixel_arcs,
            warm_start: None,
        })
    }

    /// Attaches a feasible assignment for solvers that improve an existing
    /// solution.
    pub fn with_warm_start(mut self, assignment: Vec<u32>) -> Result<Self> {
        self.check_feasible(&assignment)?;
        self.warm_start = Some(assignment);
        Ok(self)
    }

    pub fn warm_start(&self) -> Option<&[u32]> {
        self.warm_start.as_deref()
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_pixels(&self) -> usize {
        self.num_pixels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn supplies(&self) -> &[u64] {
        &self.supplies
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn position(&self, pixel: usize) -> Vec2 {
        [(pixel % self.width) as f64, (pixel / self.width) as f64]
    }

    /// Admitted arcs of one pixel in ascending site order.
    pub fn pixel_arcs(&self, pixel: usize) -> impl Iterator<Item = &Arc> + '_ {
        self.pixel_arcs[self.pixel_offsets[pixel]..self.pixel_offsets[pixel + 1]]
            .iter()
            .map(move |&id| &self.arcs[id as usize])
    }

    pub fn admitted_sites(&self, pixel: usize) -> impl Iterator<Item = usize> + '_ {
        self.pixel_arcs(pixel).map(|a| a.site as usize)
    }

    pub fn cost(&self, site: usize, pixel: usize) -> Option<i64> {
        let ids = &self.pixel_arcs[self.pixel_offsets[pixel]..self.pixel_offsets[pixel + 1]];
        ids.binary_search_by_key(&(site as u32), |&id| self.arcs[id as usize].site)
            .ok()
            .map(|i| self.arcs[ids[i] as usize].cost)
    }

    /// Checks that `assignment` uses admitted arcs and meets every supply.
    pub fn check_feasible(&self, assignment: &[u32]) -> Result<()> {
        if assignment.len() != self.num_pixels {
            return Err(Error::DimensionMismatch {
                expected: self.num_pixels,
                actual: assignment.len(),
            });
        }
        let mut counts = vec![0u64; self.num_sites];
        for (p, &s) in assignment.iter().enumerate() {
            if self.cost(s as usize, p).is_none() {
                return Err(Error::InvalidParameter(format!("pixel {p} assigned to non-admitted site {s}")));
            }
            counts[s as usize] += 1;
        }
        let starved: Vec<usize> = (0..self.num_sites).filter(|&i| counts[i] != self.supplies[i]).collect();
        if !starved.is_empty() {
            return Err(Error::Infeasible { starved });
        }
        Ok(())
    }

    /// Scaled objective of an assignment; panics on non-admitted arcs.
    pub fn objective(&self, assignment: &[u32]) -> i64 {
        assignment
            .iter()
            .enumerate()
            .map(|(p, &s)| self.cost(s as usize, p).expect("admitted arc"))
            .sum()
    }

    /// Line-oriented dump: an optional `# width W` comment, a `k N scale`
    /// header, one line of supplies, then one `i j cost` line per arc.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# width {}", self.width);
        let _ = writeln!(out, "{} {} {}", self.num_sites, self.num_pixels, self.scale);
        let supplies: Vec<String> = self.supplies.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{}", supplies.join(" "));
        for a in &self.arcs {
            let _ = writeln!(out, "{} {} {}", a.site, a.pixel, a.cost);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |detail: String| Error::parse("transport instance", detail);
        let mut width = None;
        let mut lines = text.lines().filter_map(|line| {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                let mut parts = comment.split_whitespace();
                if parts.next() == Some("width") {
                    width = parts.next().and_then(|w| w.parse::<usize>().ok());
                }
                None
            } else if line.is_empty() {
                None
            } else {
                Some(line)
            }
        });

        let header = lines.next().ok_or_else(|| err("missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("header needs `k N scale`, got {header:?}")));
        }
        let k: usize = fields[0].parse().map_err(|e| err(format!("k: {e}")))?;
        let n: usize = fields[1].parse().map_err(|e| err(format!("N: {e}")))?;
        let scale: f64 = fields[2].parse().map_err(|e| err(format!("scale: {e}")))?;

        let supplies: Vec<u64> = match k {
            0 => Vec::new(),
            _ => lines
                .next()
                .ok_or_else(|| err("missing supplies".into()))?
                .split_whitespace()
                .map(|s| s.parse().map_err(|e| err(format!("supply {s:?}: {e}"))))
                .collect::<Result<_>>()?,
        };

        let mut arcs = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(format!("arc line {line:?}")));
            }
            arcs.push(Arc {
                site: f[0].parse().map_err(|e| err(format!("arc site: {e}")))?,
                pixel: f[1].parse().map_err(|e| err(format!("arc pixel: {e}")))?,
                cost: f[2].parse().map_err(|e| err(format!("arc cost: {e}")))?,
            });
        }
        // Without a width comment the pixels are treated as a single row.
        let width = width.unwrap_or(n);
        TransportInstance::from_arcs(k, n, width, supplies, arcs, scale).map_err(|e| err(e.to_string()))
    }

    /// Objective in unscaled units.
    pub fn unscale(&self, v: i64) -> f64 {
        v as f64 / self.scale
    }
}

/// A site of the transportation problem: location, norm matrix `A`, required
/// pixel count and locality window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteSpec {
    pub center: Vec2,
    pub matrix: Mat2,
    pub supply: u64,
    pub window: BBox,
}

/// Sites `s_i = x_{c_i}`, `A_i = Σ_i⁻¹`, supply `κ_i`, window = bounding box.
pub fn sites_from_stats(stats: &[ComponentStats]) -> Result<Vec<SiteSpec>> {
    stats
        .iter()
        .map(|s| {
            Ok(SiteSpec {
                center: s.center,
                matrix: s.covariance.inverse().ok_or(Error::NotPositiveDefinite(s.covariance.0))?,
                supply: s.area as u64,
                window: s.bbox,
            })
        })
        .collect()
}

/// Admits arc `(i, j)` iff pixel `j` lies in the window of site `i`.
pub fn build_instance_for_sites(sites: &[SiteSpec], width: usize, height: usize) -> Result<TransportInstance> {
    let mut arcs = Vec::new();
    for (i, s) in sites.iter().enumerate() {
        let b = s.window;
        if b.max_x >= width || b.max_y >= height {
            return Err(Error::InvalidParameter(format!("window of site {i} exceeds the image")));
        }
        for y in b.min_y..=b.max_y {
            for x in b.min_x..=b.max_x {
                arcs.push(Arc {
                    site: i as u32,
                    pixel: (y * width + x) as u32,
                    cost: scale_cost(mahalanobis_sq([x as f64, y as f64], s.center, &s.matrix)),
                });
            }
        }
    }
    let supplies = sites.iter().map(|s| s.supply).collect();
    TransportInstance::from_arcs(sites.len(), width * height, width, supplies, arcs, COST_SCALE)
}

pub fn build_instance(stats: &[ComponentStats], width: usize, height: usize) -> Result<TransportInstance> {
    build_instance_for_sites(&sites_from_stats(stats)?, width, height)
}
