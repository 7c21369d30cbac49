//! Numerical toolkit for area-minimizing unions of two planes in R⁴.

// `!(x > 0.0)` style checks are deliberate: they reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exterior_algebra;
pub mod grassmann;
pub mod harmonic_annulus;
pub mod multiscale_scanner;
pub mod plateau_lab;
pub mod projection_bounds;
pub mod rng;
pub mod surfaces;

pub use error::{Error, Result};
