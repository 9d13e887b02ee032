//! PNG and diagram file I/O.

use std::fs;
use std::path::Path;

use ::image::{DynamicImage, ImageBuffer, ImageFormat, Luma, Rgb};

use crate::error::{Error, Result};
use crate::gbpd::Diagram;
use crate::image::RgbImage;
use crate::labels::LabelMap;
use crate::metrics::BoundaryMap;

fn open(path: &Path) -> Result<DynamicImage> {
    ::image::open(path).map_err(|source| match source {
        ::image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    })
}

/// Reads any PNG as RGB with channels scaled to `[0, 1]`; 16-bit files keep
/// their precision.
pub fn read_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let img = open(path.as_ref())?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = match img {
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => img
            .to_rgb16()
            .pixels()
            .map(|p| p.0.map(|c| c as f64 / 65535.0))
            .collect(),
        _ => img.to_rgb8().pixels().map(|p| p.0.map(|c| c as f64 / 255.0)).collect(),
    };
    RgbImage::new(w, h, data)
}

pub fn quantize_8bit(v: f64) -> u8 {
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Writes an 8-bit RGB PNG, rounding each channel half-up.
pub fn write_rgb(path: impl AsRef<Path>, img: &RgbImage) -> Result<()> {
    let path = path.as_ref();
    let raw: Vec<u8> = img.pixels().iter().flat_map(|p| p.map(quantize_8bit)).collect();
    let buf: ImageBuffer<Rgb<u8>, _> =
        ImageBuffer::from_raw(img.width() as u32, img.height() as u32, raw).expect("buffer size matches");
    save(path, DynamicImage::ImageRgb8(buf))
}

fn save(path: &Path, img: DynamicImage) -> Result<()> {
    img.save_with_format(path, ImageFormat::Png).map_err(|source| match source {
        ::image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    })
}

/// Writes labels as a 16-bit grayscale PNG, pixel value = label.
pub fn write_labels(path: impl AsRef<Path>, lm: &LabelMap) -> Result<()> {
    lm.require_total()?;
    if let Some(&l) = lm.labels().iter().find(|&&l| l > u16::MAX as i32) {
        return Err(Error::InvalidParameter(format!("label {l} does not fit in 16 bits")));
    }
    let raw: Vec<u16> = lm.labels().iter().map(|&l| l as u16).collect();
    let buf: ImageBuffer<Luma<u16>, _> =
        ImageBuffer::from_raw(lm.width() as u32, lm.height() as u32, raw).expect("buffer size matches");
    save(path.as_ref(), DynamicImage::ImageLuma16(buf))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelMap> {
    let img = open(path.as_ref())?.to_luma16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    LabelMap::from_labels(w, h, img.pixels().map(|p| p.0[0] as i32).collect())
}

/// Any nonzero channel marks a boundary pixel.
pub fn read_boundaries(path: impl AsRef<Path>) -> Result<BoundaryMap> {
    let img = open(path.as_ref())?.to_rgb16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    BoundaryMap::new(w, h, img.pixels().map(|p| p.0.iter().any(|&c| c > 0)).collect())
}

pub fn write_diagram(path: impl AsRef<Path>, diagram: &Diagram) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, diagram.to_json()).map_err(|e| Error::io(path, e))
}

pub fn read_diagram(path: impl AsRef<Path>) -> Result<Diagram> {
    let path = path.as_ref();
    Diagram::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Mat2;
    use crate::gbpd::DiagramCell;

    #[test]
    fn rgb_round_trip_is_exact_on_8bit_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        let img = RgbImage::from_fn(7, 5, |x, y| [x as f64 / 255.0, y as f64 * 3.0 / 255.0, 1.0]);
        write_rgb(&path, &img).unwrap();
        assert_eq!(read_rgb(&path).unwrap(), img);
    }

    #[test]
    fn quantization_rounds_half_up() {
        assert_eq!(quantize_8bit(0.5 / 255.0), 1);
        assert_eq!(quantize_8bit(0.49 / 255.0), 0);
        assert_eq!(quantize_8bit(1.0), 255);
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.png");
        let lm = LabelMap::from_labels(3, 2, vec![0, 1, 300, 65535, 2, 2]).unwrap();
        write_labels(&path, &lm).unwrap();
        assert_eq!(read_labels(&path).unwrap(), lm);
        let too_big = LabelMap::from_labels(1, 1, vec![70000]).unwrap();
        assert!(write_labels(&path, &too_big).is_err());
    }

    #[test]
    fn boundary_png() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gt.png");
        let img = RgbImage::from_fn(4, 1, |x, _| if x == 2 { [1.0, 1.0, 1.0] } else { [0.0; 3] });
        write_rgb(&path, &img).unwrap();
        assert_eq!(read_boundaries(&path).unwrap().bits(), &[false, false, true, false]);
    }

    #[test]
    fn diagram_file_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        let d = Diagram::new(vec![DiagramCell::new([1.0, 2.0], Mat2::IDENTITY, 0.1).unwrap()], 4, 4).unwrap();
        write_diagram(&path, &d).unwrap();
        assert_eq!(read_diagram(&path).unwrap(), d);
        assert_eq!(read_rgb(dir.path().join("missing.png")).unwrap_err().exit_code(), 2);
        fs::write(&path, "{").unwrap();
        assert_eq!(read_diagram(&path).unwrap_err().exit_code(), 2);
    }
}
