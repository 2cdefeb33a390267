//! Fixed-step RK4 and adaptive Runge–Kutta–Fehlberg 4(5) for the geodesic
//! system `(ẋ, ẏ) = (y, -2G(x, y))`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::spray::geodesic_rhs;
use crate::diffkit::ScalarField;
use crate::error::{Error, Result};
use crate::metrics::{FinslerMetric, TangentPoint, DOMAIN_MARGIN};

/// Smallest step the adaptive integrator may take before giving up.
pub const MIN_STEP: f64 = 1e-12;
const MAX_STEPS: usize = 2_000_000;
// consecutive step halvings against the domain boundary before stopping
const MAX_BOUNDARY_RETRIES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Rk4 { step: f64 },
    Rkf45 { atol: f64, rtol: f64 },
}

impl Method {
    /// Adaptive RKF45 at absolute and relative tolerance `1e-10`.
    pub const DEFAULT: Method = Method::Rkf45 {
        atol: 1e-10,
        rtol: 1e-10,
    };

    pub fn name(&self) -> &'static str {
        match self {
            Method::Rk4 { .. } => "rk4",
            Method::Rkf45 { .. } => "rkf45",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::Rk4 { step } if !(step > 0.0 && step.is_finite()) => {
                Err(Error::Config(format!("rk4 step must be positive, got {step}")))
            }
            Method::Rkf45 { atol, rtol } if !(atol > 0.0 && rtol > 0.0) => Err(Error::Config(
                format!("rkf45 tolerances must be positive, got ({atol}, {rtol})"),
            )),
            _ => Ok(()),
        }
    }
}

impl Default for Method {
    fn default() -> Self {
        Method::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// The next step would have left the domain; the trajectory ends at `t`.
    DomainExit { t: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_step: f64,
    pub max_step: f64,
}

/// Samples of an integrated geodesic at accepted steps.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<TangentPoint>,
    /// Nominal step: the fixed step for RK4, the last proposed step for RKF45.
    pub step_size: f64,
    pub integrator_name: &'static str,
    pub termination: Termination,
    pub stats: IntegratorStats,
}

impl GeodesicTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &TangentPoint {
        self.states.last().expect("trajectories hold the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold the initial time")
    }
}

fn to_state(p: &TangentPoint) -> DVector<f64> {
    let n = p.dimension();
    let mut z = DVector::zeros(2 * n);
    z.rows_mut(0, n).copy_from(&p.x);
    z.rows_mut(n, n).copy_from(&p.y);
    z
}

fn from_state(z: &DVector<f64>) -> TangentPoint {
    let n = z.len() / 2;
    TangentPoint {
        x: z.rows(0, n).into_owned(),
        y: z.rows(n, n).into_owned(),
    }
}

struct System<'a> {
    metric: &'a FinslerMetric,
    evals: usize,
}

impl System<'_> {
    fn rhs(&mut self, z: &DVector<f64>) -> Result<DVector<f64>> {
        self.evals += 1;
        geodesic_rhs(self.metric, &from_state(z))
    }

    fn inside(&self, z: &DVector<f64>) -> bool {
        let n = z.len() / 2;
        self.metric.boundary_margin(z.rows(0, n).as_slice()) > DOMAIN_MARGIN
    }
}

/// Integrates the geodesic of `metric` from `p0` over `t ∈ [0, t_end]`.
///
/// Negative `t_end` integrates backwards, which is only allowed for
/// reversible metrics. Leaving the domain ends the trajectory with
/// [`Termination::DomainExit`] at the last accepted in-domain sample.
pub fn integrate_geodesic(
    metric: &FinslerMetric,
    p0: &TangentPoint,
    t_end: f64,
    method: Method,
) -> Result<GeodesicTrajectory> {
    method.validate()?;
    if !t_end.is_finite() {
        return Err(Error::Config(format!("t_end must be finite, got {t_end}")));
    }
    if t_end < 0.0 && !metric.is_reversible() {
        return Err(Error::NonReversibleBackward(metric.name().to_string()));
    }
    metric.check_domain(p0.x.as_slice())?;
    let mut sys = System { metric, evals: 0 };
    // fail fast on a degenerate or singular initial state
    sys.rhs(&to_state(p0))?;
    sys.evals = 0;
    match method {
        Method::Rk4 { step } => rk4(&mut sys, p0, t_end, step),
        Method::Rkf45 { atol, rtol } => rkf45(&mut sys, p0, t_end, atol, rtol),
    }
}

fn rk4_step(sys: &mut System, z: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
    let k1 = sys.rhs(z)?;
    let k2 = sys.rhs(&(z + &k1 * (0.5 * h)))?;
    let k3 = sys.rhs(&(z + &k2 * (0.5 * h)))?;
    let k4 = sys.rhs(&(z + &k3 * h))?;
    Ok(z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn rk4(sys: &mut System, p0: &TangentPoint, t_end: f64, step: f64) -> Result<GeodesicTrajectory> {
    let steps = (t_end.abs() / step).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let mut times = vec![0.0];
    let mut states = vec![p0.clone()];
    let mut z = to_state(p0);
    let mut termination = Termination::Completed;
    let mut stats = IntegratorStats {
        min_step: h.abs(),
        max_step: h.abs(),
        ..Default::default()
    };
    for k in 0..steps {
        let t = k as f64 * h;
        let next = match rk4_step(sys, &z, h) {
            Ok(next) if sys.inside(&next) => next,
            Ok(_) => {
                termination = Termination::DomainExit { t };
                break;
            }
            Err(e) if e.is_domain() => {
                termination = Termination::DomainExit { t };
                break;
            }
            Err(e) => return Err(e),
        };
        z = next;
        stats.accepted += 1;
        times.push(if k + 1 == steps { t_end } else { (k + 1) as f64 * h });
        states.push(from_state(&z));
    }
    stats.rhs_evals = sys.evals;
    Ok(GeodesicTrajectory {
        times,
        states,
        step_size: step,
        integrator_name: "rk4",
        termination,
        stats,
    })
}

// Fehlberg tableau; the geodesic system is autonomous so the nodes c_i are not needed
const A: [[f64; 5]; 6] = [
    [0.0; 5],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];

/// One Fehlberg step: returns the fifth-order solution and the embedded
/// error estimate.
fn rkf_step(sys: &mut System, z: &DVector<f64>, h: f64) -> Result<(DVector<f64>, DVector<f64>)> {
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(6);
    for stage in 0..6 {
        let mut arg = z.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = A[stage][j];
            if a != 0.0 {
                arg += kj * (a * h);
            }
        }
        k.push(sys.rhs(&arg)?);
    }
    let mut high = z.clone();
    let mut err = DVector::zeros(z.len());
    for (i, ki) in k.iter().enumerate() {
        high += ki * (B5[i] * h);
        err += ki * ((B5[i] - B4[i]) * h);
    }
    Ok((high, err))
}

fn error_norm(err: &DVector<f64>, z0: &DVector<f64>, z1: &DVector<f64>, atol: f64, rtol: f64) -> f64 {
    err.iter()
        .zip(z0.iter().zip(z1.iter()))
        .map(|(e, (a, b))| e.abs() / (atol + rtol * a.abs().max(b.abs())))
        .fold(0.0, f64::max)
}

fn rkf45(
    sys: &mut System,
    p0: &TangentPoint,
    t_end: f64,
    atol: f64,
    rtol: f64,
) -> Result<GeodesicTrajectory> {
    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let span = t_end.abs();
    let mut times = vec![0.0];
    let mut states = vec![p0.clone()];
    let mut z = to_state(p0);
    let mut t = 0.0f64;
    let mut h = (0.01 * span).max(MIN_STEP);
    let mut termination = Termination::Completed;
    let mut boundary_hits = 0usize;
    let mut stats = IntegratorStats {
        min_step: f64::INFINITY,
        ..Default::default()
    };
    while span - t > 1e-15 * span.max(1.0) {
        if stats.accepted + stats.rejected > MAX_STEPS {
            return Err(Error::IntegratorStall { t: dir * t, step: h });
        }
        let last = h >= span - t;
        let step = if last { span - t } else { h };
        let trial = rkf_step(sys, &z, dir * step);
        let Some((next, err)) = (match trial {
            Ok((next, err)) if sys.inside(&next) => Some((next, err)),
            Ok(_) => None,
            Err(e) if e.is_domain() => None,
            Err(e) => return Err(e),
        }) else {
            stats.rejected += 1;
            boundary_hits += 1;
            if boundary_hits > MAX_BOUNDARY_RETRIES || step * 0.5 < MIN_STEP {
                termination = Termination::DomainExit { t: dir * t };
                break;
            }
            h = step * 0.5;
            continue;
        };
        boundary_hits = 0;
        let norm = error_norm(&err, &z, &next, atol, rtol);
        let factor = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        if norm <= 1.0 {
            t = if last { span } else { t + step };
            z = next;
            stats.accepted += 1;
            stats.min_step = stats.min_step.min(step);
            stats.max_step = stats.max_step.max(step);
            times.push(dir * t);
            states.push(from_state(&z));
            if !last {
                h = step * factor;
            }
        } else {
            stats.rejected += 1;
            h = step * factor;
            if h < MIN_STEP {
                return Err(Error::IntegratorStall { t: dir * t, step: h });
            }
        }
    }
    if stats.accepted == 0 {
        stats.min_step = 0.0;
    }
    stats.rhs_evals = sys.evals;
    Ok(GeodesicTrajectory {
        times,
        states,
        step_size: h,
        integrator_name: "rkf45",
        termination,
        stats,
    })
}
