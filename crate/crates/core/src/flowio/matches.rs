//! Sparse correspondences in the DeepMatching text layout:
//! `x1 y1 x2 y2 [score …]` per line, pixel coordinates in both frames.

use std::fs;
use std::path::{Path, PathBuf};

use log::warn;

use crate::dataterm::{Match, SparseMatches};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parsed matches plus the number of lines dropped for lying outside the
/// grid.
#[derive(Debug, Clone)]
pub struct MatchIngest<T> {
    pub matches: SparseMatches<T>,
    pub out_of_bounds: usize,
}

/// Parses match lines for a `width × height` first frame. Blank lines and
/// lines starting with `#` are skipped; the first match per pixel wins.
pub fn parse_matches<T: Scalar>(text: &str, width: usize, height: usize, path: &Path) -> Result<MatchIngest<T>> {
    let mut entries = Vec::new();
    let mut out_of_bounds = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: PathBuf::from(path),
            line: lineno + 1,
            reason,
        };
        let fields = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| parse_err(format!("not a number: {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if fields.len() < 4 {
            return Err(parse_err(format!("expected at least 4 fields, found {}", fields.len())));
        }
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(parse_err("non-finite coordinate".into()));
        }
        let (x1, y1, x2, y2) = (fields[0], fields[1], fields[2], fields[3]);
        let (px, py) = (x1.round(), y1.round());
        if px < 0.0 || py < 0.0 || px >= width as f64 || py >= height as f64 {
            out_of_bounds += 1;
            continue;
        }
        entries.push(Match {
            x: px as usize,
            y: py as usize,
            d: [T::of(x2 - x1), T::of(y2 - y1)],
        });
    }
    let (matches, rejected) = SparseMatches::from_matches(width, height, entries)?;
    debug_assert_eq!(rejected, 0);
    if out_of_bounds > 0 {
        warn!("{}: ignored {out_of_bounds} out-of-bounds matches", path.display());
    }
    Ok(MatchIngest { matches, out_of_bounds })
}

pub fn read_matches<T: Scalar>(path: impl AsRef<Path>, width: usize, height: usize) -> Result<MatchIngest<T>> {
    let path = path.as_ref();
    parse_matches(&fs::read_to_string(path)?, width, height, path)
}
