use std::path::Path;

use image::{DynamicImage, GrayImage, ImageBuffer, Luma, RgbImage};
use log::warn;

use crate::error::{Error, Result};
use crate::grid::{Image, PixelMask};
use crate::scalar::Scalar;

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

fn luma<T: Scalar>(rgb: [f64; 3], scale: f64) -> T {
    T::of((LUMA[0] * rgb[0] + LUMA[1] * rgb[1] + LUMA[2] * rgb[2]) * scale)
}

/// Loads a PGM or PNG as intensities on a 0–255 scale. 16-bit samples are
/// divided by 257; colour images are converted with BT.601 luma weights.
pub fn read_gray_image<T: Scalar>(path: impl AsRef<Path>) -> Result<Image<T>> {
    let path = path.as_ref();
    let img = image::open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<T> = match img {
        DynamicImage::ImageLuma8(b) => b.pixels().map(|p| T::of(p.0[0] as f64)).collect(),
        DynamicImage::ImageLuma16(b) => b.pixels().map(|p| T::of(p.0[0] as f64 / 257.0)).collect(),
        DynamicImage::ImageLumaA8(b) => b.pixels().map(|p| T::of(p.0[0] as f64)).collect(),
        DynamicImage::ImageLumaA16(b) => b.pixels().map(|p| T::of(p.0[0] as f64 / 257.0)).collect(),
        other => {
            warn!("{}: colour input converted to luma", path.display());
            if matches!(other, DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_)) {
                other
                    .to_rgb16()
                    .pixels()
                    .map(|p| luma(p.0.map(f64::from), 1.0 / 257.0))
                    .collect()
            } else {
                other
                    .to_rgb8()
                    .pixels()
                    .map(|p| luma(p.0.map(f64::from), 1.0))
                    .collect()
            }
        }
    };
    Image::new(w, h, data)
}

/// Writes intensities clamped to 0–255 as 8-bit grey; the format follows
/// the file extension.
pub fn write_gray_image<T: Scalar>(path: impl AsRef<Path>, image: &Image<T>) -> Result<()> {
    let (w, h) = image.shape();
    let buf: GrayImage = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
        Luma([image.get(x as usize, y as usize).as_f64().round().clamp(0.0, 255.0) as u8])
    });
    buf.save(path.as_ref())?;
    Ok(())
}

pub fn write_rgb_image(path: impl AsRef<Path>, image: &RgbImage) -> Result<()> {
    image.save(path.as_ref())?;
    Ok(())
}

/// Any nonzero sample (in any channel) marks the pixel as set.
pub fn read_mask(path: impl AsRef<Path>) -> Result<PixelMask> {
    let path = path.as_ref();
    let img = image::open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let rgb = img.to_rgb16();
    if rgb.is_empty() {
        return Err(Error::Format {
            path: path.into(),
            reason: "empty mask image".into(),
        });
    }
    PixelMask::new(w, h, rgb.pixels().map(|p| p.0.iter().any(|&c| c != 0)).collect())
}

/// Set pixels become 255, others 0.
pub fn write_mask(path: impl AsRef<Path>, mask: &PixelMask) -> Result<()> {
    let (w, h) = mask.shape();
    let buf: GrayImage = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
        Luma([if mask.get(x as usize, y as usize) { 255 } else { 0 }])
    });
    buf.save(path.as_ref())?;
    Ok(())
}
