//! Jacobi matrices generated by ratios of Gauss hypergeometric functions.
//!
//! The crate evaluates the ratio `F(a,b,c;z)/F(a,b+1,c+1;z)` through its
//! C-fraction, builds the associated (generally complex) Jacobi matrix, and
//! studies the m-function `B`, its discrete spectrum and, for real
//! parameters, its Krein-space classification.

pub mod cfrac;
pub mod classify;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod hyp;
pub mod spectral;

pub use error::{Error, Result};
pub use hyp::HypParams;
pub use num_complex::Complex64;
