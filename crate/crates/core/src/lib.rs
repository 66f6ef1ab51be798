//! Analytic discs attached to generic CR manifolds and their defect,
//! computed with spectral methods on the unit circle.

pub mod bishop;
pub mod circle;
pub mod defect;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod manifold;
pub mod random;

pub use circle::{CircleFunction, Grid, Shape, C64};
pub use error::{Error, Result};
