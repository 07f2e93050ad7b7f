//! Numerical and closed-form models of a two-pinhole interferometer imaged
//! through a Gaussian-apodized thin lens, with tools to measure fringe
//! visibility, path distinguishability and their complementarity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod analytic;
pub mod elements;
pub mod error;
pub mod fft;
pub mod field;
pub mod propagation;
pub mod scenario;

pub use error::{Error, Result};
