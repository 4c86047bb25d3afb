use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{FlowField, PixelMask};
use crate::scalar::Scalar;

/// Which pixels an evaluation covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskProvenance {
    All,
    NonOccluded,
    Valid,
    ValidNonOccluded,
}

impl fmt::Display for MaskProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::All => "all",
            Self::NonOccluded => "non-occluded",
            Self::Valid => "valid",
            Self::ValidNonOccluded => "valid-non-occluded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationReport {
    /// Mean endpoint error in pixels.
    pub aep: f64,
    pub count: usize,
    pub mask: MaskProvenance,
}

/// Mean of `‖w_est − w_gt‖₂` over the pixels selected by `mask`
/// (every pixel when `None`).
pub fn evaluate_aep<T: Scalar>(
    estimate: &FlowField<T>,
    truth: &FlowField<T>,
    mask: Option<(&PixelMask, MaskProvenance)>,
) -> Result<EvaluationReport> {
    if estimate.shape() != truth.shape() {
        return Err(Error::ShapeMismatch {
            expected: truth.shape(),
            found: estimate.shape(),
        });
    }
    if let Some((m, _)) = mask {
        if m.shape() != truth.shape() {
            return Err(Error::ShapeMismatch {
                expected: truth.shape(),
                found: m.shape(),
            });
        }
    }
    let (mut sum, mut count) = (0.0f64, 0usize);
    for i in 0..truth.len() {
        if mask.is_some_and(|(m, _)| !m.data()[i]) {
            continue;
        }
        let ([a, b], [c, d]) = (estimate.at(i), truth.at(i));
        sum += (a.as_f64() - c.as_f64()).hypot(b.as_f64() - d.as_f64());
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(EvaluationReport {
        aep: sum / count as f64,
        count,
        mask: mask.map_or(MaskProvenance::All, |(_, p)| p),
    })
}

/// Pixels where `√(‖∇u‖² + ‖∇v‖²)` from forward differences exceeds
/// `threshold`; differences leaving the grid count as zero.
pub fn motion_edges<T: Scalar>(field: &FlowField<T>, threshold: T) -> PixelMask {
    let (w, h) = field.shape();
    let mut mask = PixelMask::filled(w, h, false).expect("non-empty field");
    for y in 0..h {
        for x in 0..w {
            let here = field.get(x, y);
            let right = if x + 1 < w { field.get(x + 1, y) } else { here };
            let down = if y + 1 < h { field.get(x, y + 1) } else { here };
            let mut sq = T::zero();
            for c in 0..2 {
                let (dx, dy) = (right[c] - here[c], down[c] - here[c]);
                sq += dx * dx + dy * dy;
            }
            mask.set(x, y, sq.sqrt() > threshold);
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aep_examples() {
        let gt = FlowField::from_fn(4, 2, |x, y| [x as f64, y as f64]).unwrap();
        assert_eq!(evaluate_aep(&gt, &gt, None).unwrap().aep, 0.0);
        let shifted = gt.map(|[u, v]| [u + 1.0, v]);
        let r = evaluate_aep(&shifted, &gt, None).unwrap();
        assert_eq!((r.aep, r.count, r.mask), (1.0, 8, MaskProvenance::All));
        let half = FlowField::from_fn(4, 2, |x, y| {
            if x < 2 {
                [x as f64 + 3.0, y as f64 + 4.0]
            } else {
                [x as f64, y as f64]
            }
        })
        .unwrap();
        assert_eq!(evaluate_aep(&half, &gt, None).unwrap().aep, 2.5);
    }

    #[test]
    fn masked_and_empty() {
        let gt = FlowField::<f64>::zeros(2, 1).unwrap();
        let est = FlowField::new(2, 1, vec![0.0, 10.0], vec![0.0, 0.0]).unwrap();
        let mask = PixelMask::new(2, 1, vec![true, false]).unwrap();
        let r = evaluate_aep(&est, &gt, Some((&mask, MaskProvenance::NonOccluded))).unwrap();
        assert_eq!((r.aep, r.count, r.mask), (0.0, 1, MaskProvenance::NonOccluded));
        let none = PixelMask::filled(2, 1, false).unwrap();
        assert!(matches!(
            evaluate_aep(&est, &gt, Some((&none, MaskProvenance::Valid))),
            Err(Error::EmptyMask)
        ));
    }

    #[test]
    fn affine_field_has_no_edges_above_slope() {
        let f = FlowField::from_fn(10, 10, |x, y| [0.1 * x as f64, -0.05 * y as f64]).unwrap();
        assert_eq!(motion_edges(&f, 0.2).count(), 0);
        assert_eq!(motion_edges(&f, 1e300).count(), 0);
    }

    #[test]
    fn step_marks_boundary_column() {
        let f = FlowField::from_fn(8, 3, |x, _| [if x < 4 { 0.0 } else { 2.0 }, 0.0]).unwrap();
        let m = motion_edges(&f, 1.0);
        for y in 0..3 {
            for x in 0..8 {
                assert_eq!(m.get(x, y), x == 3);
            }
        }
    }
}
