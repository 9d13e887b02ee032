//! Segmentation runs, noise sweeps and dataset evaluation, as used by the
//! `powerslic` binary.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gbpd::{power_slic, Diagram};
use crate::image::{add_gaussian_noise, rgb_to_lab, NoiseSpec, RgbImage};
use crate::io;
use crate::labels::LabelMap;
use crate::metrics::{evaluate, BoundaryMap, DEFAULT_TOLERANCE};
use crate::optimal::{optimal_power_slic_with, Solver};
use crate::slic::{slic_superpixels, SlicParams};

pub const CSV_HEADER: &str = "image,method,k,k_out,sigma2,seed,br,bp,co,runtime_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Slic,
    Power,
    Optimal,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Slic, Method::Power, Method::Optimal];

    pub fn name(self) -> &'static str {
        match self {
            Method::Slic => "slic",
            Method::Power => "power",
            Method::Optimal => "optimal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}; expected slic, power or optimal")))
    }
}

/// Parameters of one segmentation, independent of any files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentConfig {
    pub method: Method,
    pub k: usize,
    pub m: f64,
    pub max_iters: usize,
    pub power_offset: bool,
}

impl SegmentConfig {
    pub fn new(method: Method, k: usize) -> Self {
        SegmentConfig {
            method,
            k,
            m: 10.0,
            max_iters: 10,
            power_offset: false,
        }
    }

    fn slic_params(&self) -> SlicParams {
        SlicParams::new(self.k, self.m).with_max_iters(self.max_iters)
    }
}

#[derive(Debug, Clone)]
pub struct Segmentation {
    pub labels: LabelMap,
    /// Present for the diagram-based methods.
    pub diagram: Option<Diagram>,
    /// Superpixels produced: labels in use for SLIC, diagram cells (the
    /// non-empty clusters of the assignment phase) otherwise.
    pub k_out: usize,
    pub disconnected_cells: usize,
    /// Wall time of the segmentation call alone.
    pub runtime_ms: f64,
}

pub fn segment(img: &RgbImage, cfg: &SegmentConfig) -> Result<Segmentation> {
    let lab = rgb_to_lab(img);
    let params = cfg.slic_params();
    let start = Instant::now();
    let (labels, diagram, disconnected_cells) = match cfg.method {
        Method::Slic => (slic_superpixels(&lab, &params)?, None, 0),
        Method::Power => {
            let out = power_slic(&lab, &params, cfg.power_offset)?;
            (out.labels, Some(out.diagram), out.disconnected_cells)
        }
        Method::Optimal => {
            let out = optimal_power_slic_with(&lab, &params, Solver::Auto)?;
            (out.labels, Some(out.diagram), out.disconnected_cells)
        }
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let k_out = diagram.as_ref().map_or_else(|| labels.num_labels_used(), Diagram::len);
    Ok(Segmentation {
        labels,
        diagram,
        k_out,
        disconnected_cells,
        runtime_ms,
    })
}

/// A `segment` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub segment: SegmentConfig,
    pub sigma2: f64,
    pub seed: u64,
    pub input: PathBuf,
    pub out: PathBuf,
    pub diagram: Option<PathBuf>,
}

/// Reads the input, adds noise when `sigma2 > 0`, segments, and writes the
/// 16-bit label PNG plus the diagram when requested and available.
pub fn cmd_segment(cfg: &RunConfig) -> Result<Segmentation> {
    let img = io::read_rgb(&cfg.input)?;
    let img = add_gaussian_noise(&img, NoiseSpec::new(cfg.sigma2, cfg.seed)?);
    let seg = segment(&img, &cfg.segment)?;
    io::write_labels(&cfg.out, &seg.labels)?;
    match (&cfg.diagram, &seg.diagram) {
        (Some(path), Some(d)) => io::write_diagram(path, d)?,
        (Some(_), None) => warn!("{} produces no diagram; --diagram ignored", cfg.segment.method),
        _ => {}
    }
    Ok(seg)
}

pub fn cmd_noise(input: &Path, sigma2: f64, seed: u64, output: &Path) -> Result<()> {
    let img = io::read_rgb(input)?;
    io::write_rgb(output, &add_gaussian_noise(&img, NoiseSpec::new(sigma2, seed)?))
}

/// Rasterizes a stored diagram scaled by `factor` at
/// `⌈factor · ref_width⌉ × ⌈factor · ref_height⌉`.
pub fn upscale(diagram: &Diagram, factor: f64) -> Result<LabelMap> {
    let scaled = diagram.rescale(factor)?;
    let w = (diagram.ref_width() as f64 * factor).ceil() as usize;
    let h = (diagram.ref_height() as f64 * factor).ceil() as usize;
    Ok(scaled.rasterize(w, h))
}

pub fn cmd_upscale(diagram: &Path, factor: f64, output: &Path) -> Result<LabelMap> {
    let lm = upscale(&io::read_diagram(diagram)?, factor)?;
    io::write_labels(output, &lm)?;
    Ok(lm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub dataset: PathBuf,
    /// Defaults to `dataset`.
    pub gt_dir: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub ks: Vec<usize>,
    pub sigma2s: Vec<f64>,
    pub seeds: Vec<u64>,
    pub m: f64,
    pub max_iters: usize,
    pub power_offset: bool,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
}

impl EvalConfig {
    pub fn new(dataset: impl Into<PathBuf>) -> Self {
        EvalConfig {
            dataset: dataset.into(),
            gt_dir: None,
            methods: vec![Method::Slic, Method::Power],
            ks: vec![600],
            sigma2s: vec![0.0],
            seeds: vec![0],
            m: 10.0,
            max_iters: 10,
            power_offset: false,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub image: String,
    pub method: Method,
    pub k: usize,
    pub k_out: usize,
    pub sigma2: f64,
    pub seed: u64,
    pub br: f64,
    pub bp: f64,
    pub co: f64,
    pub runtime_ms: f64,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.3}",
            self.image, self.method, self.k, self.k_out, self.sigma2, self.seed, self.br, self.bp, self.co, self.runtime_ms
        )
    }
}

fn is_ground_truth(name: &str) -> bool {
    name.contains(".gt")
}

/// Images of the dataset (`*.png`, excluding `*.gt*.png`) in lexicographic
/// order of file name.
pub fn dataset_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if name.ends_with(".png") && !is_ground_truth(name) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// All `<stem>.gt*.png` files in `dir`, sorted.
pub fn ground_truth_files(dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let prefix = format!("{stem}.gt");
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if name.starts_with(&prefix) && name.ends_with(".png") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

struct Loaded {
    id: String,
    image: RgbImage,
    gts: Vec<BoundaryMap>,
}

fn load(path: &Path, gt_dir: &Path) -> Result<Loaded> {
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
    let image = io::read_rgb(path)?;
    let gts = ground_truth_files(gt_dir, &id)?
        .iter()
        .map(io::read_boundaries)
        .collect::<Result<Vec<_>>>()?;
    if gts.is_empty() {
        warn!("{id}: no ground truth, br and bp will be NaN");
    }
    Ok(Loaded { id, image, gts })
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// One row per (image, method, k, σ², seed) in that nesting order. Cells
/// run in parallel; row order does not depend on scheduling.
pub fn run_eval(cfg: &EvalConfig) -> Result<Vec<SweepRow>> {
    let gt_dir = cfg.gt_dir.as_deref().unwrap_or(&cfg.dataset);
    let mut images = Vec::new();
    for path in dataset_images(&cfg.dataset)? {
        match load(&path, gt_dir) {
            Ok(l) => images.push(l),
            Err(e) => warn!("skipping {}: {e}", path.display()),
        }
    }
    if images.is_empty() {
        return Err(Error::EmptyDataset(cfg.dataset.clone()));
    }
    for &s in &cfg.sigma2s {
        NoiseSpec::new(s, 0)?;
    }

    let mut cells = Vec::new();
    for img in &images {
        for &method in &cfg.methods {
            for &k in &cfg.ks {
                for &sigma2 in &cfg.sigma2s {
                    for &seed in &cfg.seeds {
                        cells.push((img, method, k, sigma2, seed));
                    }
                }
            }
        }
    }
    info!("{} images, {} cells", images.len(), cells.len());

    pool(cfg.threads)?.install(|| {
        cells
            .par_iter()
            .map(|&(img, method, k, sigma2, seed)| {
                let noisy = add_gaussian_noise(&img.image, NoiseSpec { variance: sigma2, seed });
                let seg_cfg = SegmentConfig {
                    method,
                    k,
                    m: cfg.m,
                    max_iters: cfg.max_iters,
                    power_offset: cfg.power_offset,
                };
                let seg = segment(&noisy, &seg_cfg)?;
                let scores = evaluate(&seg.labels, &img.gts, DEFAULT_TOLERANCE)?;
                Ok(SweepRow {
                    image: img.id.clone(),
                    method,
                    k,
                    k_out: seg.k_out,
                    sigma2,
                    seed,
                    br: scores.br,
                    bp: scores.bp,
                    co: scores.co,
                    runtime_ms: seg.runtime_ms,
                })
            })
            .collect()
    })
}

pub fn write_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r.to_csv());
        text.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
