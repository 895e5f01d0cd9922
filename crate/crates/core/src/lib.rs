//! Affine-equivariant robust mean estimation.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: point sets, directions, covariance, whitening and the Mahalanobis norm.
//! - [`trimmed`]: one-dimensional trimmed mean / mean absolute deviation oracles.
//! - [`median`]: the slab-intersection median computed by a cutting-plane min-max solver.
//! - [`estimators`]: the bucketed estimator and the classical baselines.
//! - [`instances`]: hard distributions, contamination models and their exact moments.

pub mod error;
pub mod estimators;
pub mod geometry;
pub mod instances;
pub mod median;
pub mod rng;
pub mod trimmed;

pub use error::{Error, Result};
pub use geometry::{Direction, PointSet, SpdMatrix, Tolerances, TOL};
