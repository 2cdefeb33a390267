//! First integrals of geodesically equivalent Finsler metrics.
//!
//! Given two projectively related Finsler metrics `F` and `F̃`, the
//! coefficients `f_α` of `det(H + ΛI)` with `H = (F/F̃) g⁻¹ h̃` are constant
//! along the geodesics of `F` (and, being 0-homogeneous, along those of every
//! metric in the same projective class). This crate evaluates those
//! coefficients and everything needed to check the claim numerically:
//!
//! - [`diffkit`]: second-order forward-mode jets of `F(x, y)`;
//! - [`metrics`]: the metric catalog, `g`, `g⁻¹`, `h`, `det g`;
//! - [`dynamics`]: spray coefficients, geodesic integration, Rapcsák residuals;
//! - [`integrals`]: `H`, the characteristic polynomial, `f_α` and the closed forms;
//! - [`oracle`]: independent brute-force checks of the above;
//! - [`sampling`]: seeded in-domain tangent points.

pub mod diffkit;
pub mod dynamics;
pub mod error;
pub mod integrals;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod sampling;

pub use error::{Error, Result};
pub use nalgebra;
pub use metrics::{catalog_metric, FinslerMetric, MetricDescriptor, MetricJet, ProjectivePair, TangentPoint};
