//! Grid containers, the directional neighborhood system and scan-path
//! enumeration.
//!
//! Grids are row-major with the origin at the top-left pixel. `x` is the
//! column index and `y` the row index; a direction `(dx, dy)` steps `dx`
//! columns and `dy` rows.

use crate::error::{invalid_param, Error, Result};
use crate::scalar::Scalar;

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(())
}

/// Scalar intensity image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> Image<T> {
    /// Wraps row-major samples. Rejects empty grids, a length mismatch and
    /// non-finite samples.
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(invalid_param(
                "data",
                format!("expected {} samples, got {}", width * height, data.len()),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid_param("data", "image contains non-finite samples"));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Builds an image from samples that are known to be finite and sized.
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.data[y * self.width + x] = value;
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn cast<U: Scalar>(&self) -> Image<U> {
        Image::from_raw(
            self.width,
            self.height,
            self.data.iter().map(|v| U::of(v.as_f64())).collect(),
        )
    }
}

/// Dense displacement field `w = (u, v)` in pixels per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField<T> {
    width: usize,
    height: usize,
    u: Vec<T>,
    v: Vec<T>,
}

impl<T: Scalar> FlowField<T> {
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::constant(width, height, T::zero(), T::zero())
    }

    pub fn constant(width: usize, height: usize, u: T, v: T) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            u: vec![u; width * height],
            v: vec![v; width * height],
        })
    }

    /// Wraps component planes. Rejects mismatched lengths and non-finite
    /// displacements.
    pub fn new(width: usize, height: usize, u: Vec<T>, v: Vec<T>) -> Result<Self> {
        check_dims(width, height)?;
        if u.len() != width * height || v.len() != width * height {
            return Err(invalid_param("flow", "component length does not match grid"));
        }
        let out = Self { width, height, u, v };
        if !out.is_finite() {
            return Err(invalid_param("flow", "flow contains non-finite values"));
        }
        Ok(out)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [T; 2]) -> Result<Self> {
        check_dims(width, height)?;
        let n = width * height;
        let (mut u, mut v) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for y in 0..height {
            for x in 0..width {
                let [a, b] = f(x, y);
                u.push(a);
                v.push(b);
            }
        }
        Self::new(width, height, u, v)
    }

    pub(crate) fn from_raw(width: usize, height: usize, u: Vec<T>, v: Vec<T>) -> Self {
        debug_assert!(u.len() == width * height && v.len() == width * height);
        Self { width, height, u, v }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.u.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    #[inline]
    pub fn u(&self) -> &[T] {
        &self.u
    }

    #[inline]
    pub fn v(&self) -> &[T] {
        &self.v
    }

    #[inline]
    pub fn u_mut(&mut self) -> &mut [T] {
        &mut self.u
    }

    #[inline]
    pub fn v_mut(&mut self) -> &mut [T] {
        &mut self.v
    }

    /// Component planes `[u, v]`.
    #[inline]
    pub fn channels(&self) -> [&[T]; 2] {
        [&self.u, &self.v]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [T; 2] {
        let i = y * self.width + x;
        [self.u[i], self.v[i]]
    }

    #[inline]
    pub fn at(&self, index: usize) -> [T; 2] {
        [self.u[index], self.v[index]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: [T; 2]) {
        let i = y * self.width + x;
        self.u[i] = value[0];
        self.v[i] = value[1];
    }

    #[inline]
    pub fn set_at(&mut self, index: usize, value: [T; 2]) {
        self.u[index] = value[0];
        self.v[index] = value[1];
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    /// `max_x ‖self(x) − other(x)‖_∞`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn([T; 2]) -> [T; 2]) -> Self {
        let mut out = self.clone();
        for i in 0..self.len() {
            out.set_at(i, f(self.at(i)));
        }
        out
    }

    /// Pixelwise `f(self, other)`.
    pub fn zip_map(&self, other: &Self, f: impl Fn([T; 2], [T; 2]) -> [T; 2]) -> Self {
        debug_assert_eq!(self.shape(), other.shape());
        let mut out = self.clone();
        for i in 0..self.len() {
            out.set_at(i, f(self.at(i), other.at(i)));
        }
        out
    }

    /// Swaps rows and columns, swapping the `u` and `v` components too.
    pub fn transpose(&self) -> Self {
        let (w, h) = self.shape();
        let mut out = Self::from_raw(h, w, vec![T::zero(); w * h], vec![T::zero(); w * h]);
        for y in 0..h {
            for x in 0..w {
                let [a, b] = self.get(x, y);
                out.set(y, x, [b, a]);
            }
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> FlowField<U> {
        let conv = |s: &[T]| s.iter().map(|v| U::of(v.as_f64())).collect();
        FlowField::from_raw(self.width, self.height, conv(&self.u), conv(&self.v))
    }
}

/// Boolean per-pixel mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl PixelMask {
    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(invalid_param("mask", "mask length does not match grid"));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self { width, height, data })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn and(&self, other: &Self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a && b).collect(),
        }
    }

    pub fn not(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&a| !a).collect(),
        }
    }
}

/// Integer step `(dx, dy)` between neighbouring pixels on a scan path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    pub dx: i32,
    pub dy: i32,
}

impl Direction {
    /// `(0, 1)`: down a column.
    pub const VERTICAL: Self = Self { dx: 0, dy: 1 };
    /// `(1, 0)`: along a row.
    pub const HORIZONTAL: Self = Self { dx: 1, dy: 0 };
    /// `(1, 1)`.
    pub const DIAGONAL: Self = Self { dx: 1, dy: 1 };
    /// `(−1, 1)`.
    pub const ANTIDIAGONAL: Self = Self { dx: -1, dy: 1 };

    /// Accepts the unit steps of the 8-neighbourhood: the four canonical
    /// directions and their reversals.
    pub fn new(dx: i32, dy: i32) -> Result<Self> {
        if (dx, dy) == (0, 0) || dx.abs() > 1 || dy.abs() > 1 {
            return Err(Error::UnsupportedDirection(dx, dy));
        }
        Ok(Self { dx, dy })
    }

    pub fn reversed(self) -> Self {
        Self {
            dx: -self.dx,
            dy: -self.dy,
        }
    }

    pub fn is_axial(self) -> bool {
        self.dx == 0 || self.dy == 0
    }
}

/// Neighbourhood system `D` with per-direction boundary-length weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet<T> {
    directions: Vec<Direction>,
    weights: Vec<T>,
}

impl<T: Scalar> DirectionSet<T> {
    pub fn new(directions: Vec<Direction>, weights: Vec<T>) -> Result<Self> {
        if directions.is_empty() {
            return Err(invalid_param("directions", "direction set is empty"));
        }
        if directions.len() != weights.len() {
            return Err(invalid_param("weights", "one weight per direction required"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > T::zero())) {
            return Err(invalid_param("weights", "weights must be positive and finite"));
        }
        for d in &directions {
            Direction::new(d.dx, d.dy)?;
        }
        Ok(Self { directions, weights })
    }

    /// The 4-neighbourhood `{(0,1), (1,0), (1,1), (−1,1)}` with weights
    /// `√2 − 1` on the axes and `1 − √2/2` on the diagonals.
    pub fn four() -> Self {
        let sqrt2 = T::of(2.0).sqrt();
        let axial = sqrt2 - T::one();
        let diagonal = T::one() - sqrt2 / T::of(2.0);
        Self {
            directions: vec![
                Direction::VERTICAL,
                Direction::HORIZONTAL,
                Direction::DIAGONAL,
                Direction::ANTIDIAGONAL,
            ],
            weights: vec![axial, axial, diagonal, diagonal],
        }
    }

    /// Axial directions only, unit weights. Produces blocky segment
    /// boundaries.
    pub fn axial() -> Self {
        Self {
            directions: vec![Direction::VERTICAL, Direction::HORIZONTAL],
            weights: vec![T::one(), T::one()],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (Direction, T)> + '_ {
        self.directions.iter().copied().zip(self.weights.iter().copied())
    }
}

impl<T: Scalar> Default for DirectionSet<T> {
    fn default() -> Self {
        Self::four()
    }
}

/// Default neighbourhood system (four directions).
pub fn default_direction_set<T: Scalar>() -> DirectionSet<T> {
    DirectionSet::four()
}

/// Maximal run of pixels obtained by repeatedly stepping along one
/// direction. The 1D abscissa of `pixels[i]` is `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanPath {
    direction: Direction,
    pixels: Vec<[usize; 2]>,
}

impl ScanPath {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Pixel coordinates `[x, y]` in path order.
    pub fn pixels(&self) -> &[[usize; 2]] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Abscissae `1..=len` used by the line fits.
    pub fn abscissae(&self) -> impl Iterator<Item = usize> {
        1..=self.pixels.len()
    }

    /// Row-major linear indices in path order.
    pub fn linear_indices(&self, width: usize) -> Vec<usize> {
        self.pixels.iter().map(|&[x, y]| y * width + x).collect()
    }

    pub fn reversed(&self) -> Self {
        let mut pixels = self.pixels.clone();
        pixels.reverse();
        Self {
            direction: self.direction.reversed(),
            pixels,
        }
    }
}

/// Splits a `width × height` grid into the scan paths of `direction`.
///
/// Paths start at every pixel whose predecessor lies outside the grid, in
/// row-major order of their first pixel.
pub fn enumerate_scan_paths(width: usize, height: usize, direction: Direction) -> Result<Vec<ScanPath>> {
    check_dims(width, height)?;
    let direction = Direction::new(direction.dx, direction.dy)?;
    let (w, h) = (width as i64, height as i64);
    let (dx, dy) = (direction.dx as i64, direction.dy as i64);
    let inside = |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h;
    let mut paths = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if inside(x - dx, y - dy) {
                continue;
            }
            let mut pixels = Vec::new();
            let (mut cx, mut cy) = (x, y);
            while inside(cx, cy) {
                pixels.push([cx as usize, cy as usize]);
                cx += dx;
                cy += dy;
            }
            paths.push(ScanPath { direction, pixels });
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_matches_four_neighbourhood() {
        let set = default_direction_set::<f64>();
        assert_eq!(set.len(), 4);
        assert_eq!(
            set.directions(),
            &[
                Direction::new(0, 1).unwrap(),
                Direction::new(1, 0).unwrap(),
                Direction::new(1, 1).unwrap(),
                Direction::new(-1, 1).unwrap()
            ]
        );
        let w = set.weights();
        assert!((w[0] - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((w[2] - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-15);
        assert_eq!(w[0], w[1]);
        assert_eq!(w[2], w[3]);
        assert!(w.iter().all(|x| x.is_finite() && *x > 0.0));
    }

    #[test]
    fn axial_set() {
        let set = DirectionSet::<f32>::axial();
        assert_eq!(set.len(), 2);
        assert_eq!(set.weights(), &[1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_weights_and_directions() {
        assert!(DirectionSet::new(vec![Direction::VERTICAL], vec![0.0f64]).is_err());
        assert!(DirectionSet::new(vec![Direction::VERTICAL], vec![f64::NAN]).is_err());
        assert!(matches!(Direction::new(2, 1), Err(Error::UnsupportedDirection(2, 1))));
        assert!(Direction::new(0, 0).is_err());
        assert!(enumerate_scan_paths(3, 3, Direction { dx: 0, dy: 2 }).is_err());
    }

    #[test]
    fn rows_of_square() {
        let paths = enumerate_scan_paths(3, 3, Direction::HORIZONTAL).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths.iter().all(|p| p.len() == 3));
        assert_eq!(paths[1].pixels(), &[[0, 1], [1, 1], [2, 1]]);
    }

    #[test]
    fn diagonals_of_square() {
        let paths = enumerate_scan_paths(3, 3, Direction::DIAGONAL).unwrap();
        let mut lens: Vec<_> = paths.iter().map(ScanPath::len).collect();
        assert_eq!(paths.len(), 5);
        lens.sort_unstable();
        assert_eq!(lens, vec![1, 1, 2, 2, 3]);
        let main = paths.iter().find(|p| p.len() == 3).unwrap();
        assert_eq!(main.pixels(), &[[0, 0], [1, 1], [2, 2]]);
    }

    #[test]
    fn antidiagonal_steps_left() {
        let paths = enumerate_scan_paths(3, 2, Direction::ANTIDIAGONAL).unwrap();
        for p in &paths {
            for pair in p.pixels().windows(2) {
                assert_eq!(pair[1][0] as i64 - pair[0][0] as i64, -1);
                assert_eq!(pair[1][1] as i64 - pair[0][1] as i64, 1);
            }
        }
        assert_eq!(paths.iter().map(ScanPath::len).sum::<usize>(), 6);
    }

    #[test]
    fn transpose_swaps_components() {
        let f = FlowField::from_fn(3, 2, |x, y| [x as f64, 10.0 * y as f64]).unwrap();
        let t = f.transpose();
        assert_eq!(t.shape(), (2, 3));
        assert_eq!(t.get(1, 2), [10.0, 2.0]);
        assert_eq!(t.transpose(), f);
    }

    #[test]
    fn image_rejects_non_finite() {
        assert!(Image::new(1, 1, vec![f64::INFINITY]).is_err());
        assert!(Image::new(2, 1, vec![1.0f64]).is_err());
        assert!(Image::<f64>::filled(0, 3, 0.0).is_err());
    }
}
