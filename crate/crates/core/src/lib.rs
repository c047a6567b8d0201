//! Plancherel-random Young diagrams and the determinantal processes that
//! govern their boundaries.
//!
//! The crate is organized by subsystem:
//!
//! - [`partitions`]: exact combinatorics of Young diagrams, descent sequences,
//!   profiles and the limit shape.
//! - [`kernels`]: Bessel-function tables, the discrete Bessel and sine
//!   kernels, correlation determinants and a contour-integral oracle.
//! - [`variance`]: kernel-sum variances of linear statistics and local-pattern
//!   variance densities of the sine process.
//! - [`sampling`]: RSK-based Plancherel sampling, Monte-Carlo estimators and
//!   exact finite-window determinantal sampling.
//! - [`stats`]: moments, normality diagnostics and log-slope fits.
//! - [`cli`]: the `planchlab` command-line front end.

pub mod cli;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod partitions;
pub mod sampling;
pub mod stats;
pub mod variance;

pub use error::{Error, Result};
