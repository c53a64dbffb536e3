//! Fracture of geometrically exact, torsion-free Kirchhoff beams.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod beam;
pub mod cohesive;
pub mod error;
pub mod io;
pub mod linalg;
pub mod loads;
pub mod mesh;
pub mod quadrature;
pub mod scenarios;
pub mod solvers;

pub use error::{Error, Result};
