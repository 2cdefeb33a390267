use serde::Serialize;

use super::PairPoint;
use crate::dynamics::{energy_along, integrate_geodesic, GeodesicTrajectory, Method};
use crate::error::Result;
use crate::metrics::{FinslerMetric, ProjectivePair, TangentPoint};

/// Deviation of a sampled quantity from its initial value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub initial: f64,
    pub max_abs: f64,
    /// `max_abs / max(floor, |initial|)`
    pub max_rel: f64,
}

impl Drift {
    /// `floor = 1` gives the `max(1, |v₀|)` normalisation used for `f_α`;
    /// `floor = 0` gives a plain relative drift.
    pub fn of(values: &[f64], floor: f64) -> Drift {
        let initial = values.first().copied().unwrap_or(0.0);
        let max_abs = values.iter().map(|v| (v - initial).abs()).fold(0.0, f64::max);
        let scale = initial.abs().max(floor);
        Drift {
            initial,
            max_abs,
            max_rel: if scale > 0.0 { max_abs / scale } else { max_abs },
        }
    }
}

/// `f_1 … f_n` of `pair` at every sample of `traj`.
pub fn integral_series(pair: &ProjectivePair, traj: &GeodesicTrajectory) -> Result<Vec<Vec<f64>>> {
    traj.states
        .iter()
        .map(|s| Ok(PairPoint::new(pair, s)?.first_integrals()?.f))
        .collect()
}

/// A geodesic of `flow` with the pair's first integrals and the flow's
/// energy sampled along it.
#[derive(Debug, Clone)]
pub struct ConservationRun {
    pub trajectory: GeodesicTrajectory,
    /// Per sample: `f_1 … f_n`.
    pub integrals: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    /// Drifts of `f_1 … f_{n-1}`.
    pub drifts: Vec<Drift>,
    pub energy_drift: Drift,
}

impl ConservationRun {
    pub fn max_integral_drift(&self) -> f64 {
        self.drifts.iter().map(|d| d.max_rel).fold(0.0, f64::max)
    }
}

/// Integrates the geodesic of `flow` from `p0` and records how far each
/// nontrivial `f_α` of `pair` and the energy `F²` of `flow` wander.
///
/// `flow` is usually `pair.base`; any metric projectively equivalent to it
/// shares the same `f_α`.
pub fn conservation_run(
    pair: &ProjectivePair,
    flow: &FinslerMetric,
    p0: &TangentPoint,
    t_end: f64,
    method: Method,
) -> Result<ConservationRun> {
    let trajectory = integrate_geodesic(flow, p0, t_end, method)?;
    let integrals = integral_series(pair, &trajectory)?;
    let energy = energy_along(flow, &trajectory)?;
    let n = pair.dimension();
    let drifts = (0..n - 1)
        .map(|a| {
            let series: Vec<f64> = integrals.iter().map(|f| f[a]).collect();
            Drift::of(&series, 1.0)
        })
        .collect();
    let energy_drift = Drift::of(&energy, 0.0);
    Ok(ConservationRun {
        trajectory,
        integrals,
        energy,
        drifts,
        energy_drift,
    })
}
