//! Discrete curve shortening on polygons and its solitons.
//!
//! The shortening map `T(x)_j = ¼(x_{j−1} + 2x_j + x_{j+1})` sends some
//! polygons to affine images of themselves. Such solitons are sampled from
//! curves solving `c'' = B c + d`, whose affine maps come from the matrix
//! series `co_B` and `si_B`.

// `!(x >= 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod jordan;
pub mod matfun;
pub mod polygon;
pub mod semidiscrete;
pub mod soliton;
pub mod zoo;

pub use error::{Error, Result};
pub use matfun::{co_si, MatPair, SquareMatrix, Vector};
pub use polygon::{Polygon, SolitonResidualReport, Topology};
pub use soliton::{AffineMap, InhomogeneityCase, SolitonCurve, SolitonSpec};
pub use zoo::{PresetId, ZooPreset};
