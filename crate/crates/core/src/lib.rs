//! Piecewise-affine optical flow.
//!
//! The flow energy couples an L1 linearized brightness-constancy term with
//! an affine Potts prior along four line directions. ADMM splits it into a
//! pointwise data update and one exact 1D piecewise-affine Potts problem per
//! scan line, solved by dynamic programming in [`potts1d`].
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common choices.

// `!(x > 0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataterm;
pub mod error;
pub mod flowio;
pub mod grid;
pub mod potts1d;
pub mod pyramid;
pub mod regularizer;
pub mod scalar;
pub mod solver;
pub mod synthetic;

pub use error::{Error, Result};
pub use grid::{Direction, DirectionSet, FlowField, Image, PixelMask, ScanPath};
pub use pyramid::{coarse_to_fine_estimate, Estimate, PyramidConfig};
pub use regularizer::RegularizerMode;
pub use scalar::Scalar;
pub use solver::{admm_solve, Solution, SolverConfig};

pub type ImageF32 = Image<f32>;
pub type ImageF64 = Image<f64>;
pub type FlowFieldF32 = FlowField<f32>;
pub type FlowFieldF64 = FlowField<f64>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type PyramidConfigF64 = PyramidConfig<f64>;
