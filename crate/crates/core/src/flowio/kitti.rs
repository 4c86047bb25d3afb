//! KITTI flow maps: 16-bit RGB PNG with `u = (R − 2¹⁵)/64`,
//! `v = (G − 2¹⁵)/64` and `B ≠ 0` marking valid pixels.

use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, Rgb};

use crate::error::{Error, Result};
use crate::grid::{FlowField, PixelMask};
use crate::scalar::Scalar;

const OFFSET: f64 = 32768.0;
const SCALE: f64 = 64.0;

/// Reads a KITTI flow map. Invalid pixels carry zero flow.
pub fn read_kitti_flow_png<T: Scalar>(path: impl AsRef<Path>) -> Result<(FlowField<T>, PixelMask)> {
    let path = path.as_ref();
    let img = image::ImageReader::open(path)?.with_guessed_format()?.decode()?;
    let DynamicImage::ImageRgb16(buf) = img else {
        return Err(Error::Format {
            path: PathBuf::from(path),
            reason: format!("expected 16-bit RGB PNG, found {:?}", img.color()),
        });
    };
    let (w, h) = (buf.width() as usize, buf.height() as usize);
    let mut flow = FlowField::zeros(w, h)?;
    let mut valid = PixelMask::filled(w, h, false)?;
    for (x, y, px) in buf.enumerate_pixels() {
        let [r, g, b] = px.0;
        if b != 0 {
            let (x, y) = (x as usize, y as usize);
            valid.set(x, y, true);
            flow.set(
                x,
                y,
                [T::of((r as f64 - OFFSET) / SCALE), T::of((g as f64 - OFFSET) / SCALE)],
            );
        }
    }
    Ok((flow, valid))
}

fn quantize<T: Scalar>(value: T) -> u16 {
    (value.as_f64() * SCALE + OFFSET).round().clamp(0.0, 65535.0) as u16
}

/// Writes a KITTI flow map; `valid` defaults to every pixel.
pub fn write_kitti_flow_png<T: Scalar>(
    path: impl AsRef<Path>,
    flow: &FlowField<T>,
    valid: Option<&PixelMask>,
) -> Result<()> {
    let (w, h) = flow.shape();
    if let Some(m) = valid {
        if m.shape() != flow.shape() {
            return Err(Error::ShapeMismatch {
                expected: flow.shape(),
                found: m.shape(),
            });
        }
    }
    let buf = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
        let (x, y) = (x as usize, y as usize);
        if valid.is_some_and(|m| !m.get(x, y)) {
            return Rgb([0u16, 0, 0]);
        }
        let [u, v] = flow.get(x, y);
        Rgb([quantize(u), quantize(v), 1])
    });
    DynamicImage::ImageRgb16(buf).save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}
