//! Middlebury `.flo`: little-endian `f32` magic `202021.25`, `i32` width,
//! `i32` height, then interleaved `f32` `(u, v)` pairs in row-major order.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::FlowField;
use crate::scalar::Scalar;

pub const FLO_MAGIC: f32 = 202021.25;

const HEADER_LEN: usize = 12;

pub fn encode_flo<T: Scalar>(field: &FlowField<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * field.len());
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&(field.width() as i32).to_le_bytes());
    out.extend_from_slice(&(field.height() as i32).to_le_bytes());
    for i in 0..field.len() {
        let [u, v] = field.at(i);
        out.extend_from_slice(&(u.as_f64() as f32).to_le_bytes());
        out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out
}

fn word(bytes: &[u8], offset: usize) -> [u8; 4] {
    bytes[offset..offset + 4].try_into().expect("four bytes")
}

/// Parses a `.flo` byte stream; `path` only labels errors.
pub fn decode_flo<T: Scalar>(bytes: &[u8], path: &Path) -> Result<FlowField<T>> {
    let fail = |reason: String| Error::Format {
        path: PathBuf::from(path),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(fail(format!("truncated header ({} bytes)", bytes.len())));
    }
    let magic = f32::from_le_bytes(word(bytes, 0));
    if magic != FLO_MAGIC {
        return Err(fail(format!("bad magic {magic}")));
    }
    let width = i32::from_le_bytes(word(bytes, 4));
    let height = i32::from_le_bytes(word(bytes, 8));
    if width <= 0 || height <= 0 {
        return Err(fail(format!("non-positive dimensions {width}x{height}")));
    }
    let (width, height) = (width as usize, height as usize);
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| fail("dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(fail(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let n = width * height;
    let (mut u, mut v) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let base = HEADER_LEN + 8 * i;
        let a = f32::from_le_bytes(word(bytes, base));
        let b = f32::from_le_bytes(word(bytes, base + 4));
        if !(a.is_finite() && b.is_finite()) {
            return Err(fail(format!("non-finite flow at pixel {i}")));
        }
        u.push(T::of(a as f64));
        v.push(T::of(b as f64));
    }
    FlowField::new(width, height, u, v)
}

pub fn read_flo<T: Scalar>(path: impl AsRef<Path>) -> Result<FlowField<T>> {
    let path = path.as_ref();
    decode_flo(&fs::read(path)?, path)
}

pub fn write_flo<T: Scalar>(path: impl AsRef<Path>, field: &FlowField<T>) -> Result<()> {
    fs::write(path, encode_flo(field))?;
    Ok(())
}
