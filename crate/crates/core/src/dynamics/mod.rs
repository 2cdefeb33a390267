//! Geodesic spray, geodesic integration and the Rapcsák equivalence test.

mod integrate;
mod paths;
mod spray;

pub use integrate::{
    integrate_geodesic, GeodesicTrajectory, IntegratorStats, Method, Termination, MIN_STEP,
};
pub use paths::{path_distance, ArcLengthPath};
pub use spray::{
    geodesic_rhs, rapcsak_point, rapcsak_residual, spray_coefficients, spray_from_jet,
    RapcsakReport, SprayEval,
};

use crate::diffkit::ScalarField;
use crate::error::Result;
use crate::metrics::{FinslerMetric, TangentPoint};

/// `F²`, the energy integral, at each sample of a trajectory.
pub fn energy_along(metric: &FinslerMetric, traj: &GeodesicTrajectory) -> Result<Vec<f64>> {
    traj.states
        .iter()
        .map(|s: &TangentPoint| metric.value(s.x.as_slice(), s.y.as_slice()).map(|f| f * f))
        .collect()
}
