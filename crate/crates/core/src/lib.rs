//! Diagram-based superpixel segmentation.
//!
//! The crate implements three segmentation pipelines over a CIELAB image:
//!
//! * [`slic::slic_superpixels`]: classic SLIC (windowed 5D k-means) followed by
//!   connected-component merging.
//! * [`gbpd::power_slic`]: SLIC's assignment phase followed by a final
//!   assignment to a generalized balanced power diagram whose weights come
//!   from a closed-form area heuristic.
//! * [`optimal::optimal_power_slic`]: SLIC's assignment phase followed by an
//!   exact balanced least-squares assignment. The dual potentials of that
//!   transportation problem are the diagram weights, so the result is itself
//!   a power diagram.
//!
//! Diagrams are resolution independent; see [`gbpd::Diagram::rescale`] and
//! [`gbpd::Diagram::rasterize`]. Boundary recall, boundary precision and
//! compactness live in [`metrics`]; the batch harness behind the `powerslic`
//! binary lives in [`bench`].

pub mod bench;
pub mod components;
mod error;
pub mod gbpd;
pub mod geometry;
pub mod image;
pub mod io;
pub mod labels;
pub mod metrics;
pub mod optimal;
pub mod slic;
pub mod stats;
pub mod synthetic;

pub use crate::error::{Error, Result};
pub use crate::gbpd::{Diagram, DiagramCell};
pub use crate::geometry::{Mat2, Vec2};
pub use crate::image::{LabImage, NoiseSpec, RgbImage};
pub use crate::labels::LabelMap;
pub use crate::slic::SlicParams;
pub use crate::stats::ComponentStats;
