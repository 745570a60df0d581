//! Normalized Ricci flow on rotationally symmetric two-spheres, isoperimetric
//! profiles of polar caps, and the Rosenau-model comparison monitors.
//!
//! A metric is `e^{2u(ψ)}` times the round metric, sampled on a uniform
//! colatitude grid ([`metric`]). [`flow`] integrates the conformal-factor
//! equation, [`profile`] builds cap profiles, [`rosenau`] holds the explicit
//! model solution and [`comparison`] ties them together.

// `!(x <= limit)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod cli;
pub mod comparison;
pub mod config;
pub mod error;
pub mod flow;
pub mod metric;
pub mod profile;
mod quadrature;
pub mod roots;
pub mod rosenau;
mod spline;
pub mod verify;

pub use error::{Error, Result};
pub use metric::{AxisymMetric, ColatitudeGrid, CurvatureField};

/// Version string echoed into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
