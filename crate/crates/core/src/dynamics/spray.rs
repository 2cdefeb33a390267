use nalgebra::DVector;
use serde::Serialize;

use crate::diffkit::{evaluate, EvalRequest};
use crate::error::{Error, Result};
use crate::metrics::{metric_jet, FinslerMetric, MetricJet, ProjectivePair, TangentPoint};

/// Spray coefficients `G^i` at one tangent point; the spray itself is
/// `S = y^i ∂/∂x^i - 2 G^i ∂/∂y^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SprayEval {
    pub g: DVector<f64>,
}

/// `G^i = ¼ g^{il} (y^k ∂²F²/∂y^l∂x^k - ∂F²/∂x^l)` from an assembled jet.
pub fn spray_from_jet(jet: &MetricJet) -> SprayEval {
    let rhs = &jet.f2_yx * &jet.y - &jet.f2_x;
    SprayEval {
        g: (&jet.g_inv * rhs) * 0.25,
    }
}

pub fn spray_coefficients(metric: &FinslerMetric, p: &TangentPoint) -> Result<SprayEval> {
    Ok(spray_from_jet(&metric_jet(metric, p)?))
}

/// The geodesic vector field as a first-order system: `(ẋ, ẏ) = (y, -2G)`.
pub fn geodesic_rhs(metric: &FinslerMetric, p: &TangentPoint) -> Result<DVector<f64>> {
    let n = p.dimension();
    let spray = spray_coefficients(metric, p)?;
    let mut out = DVector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(&p.y);
    out.rows_mut(n, n).copy_from(&(spray.g * -2.0));
    Ok(out)
}

/// Rapcsák residuals `r_i = S(∂F̃/∂y^i) - ∂F̃/∂x^i` over a sample set, with
/// `S` the spray of the pair's base metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RapcsakReport {
    pub residuals: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub max_norm: f64,
    pub mean_norm: f64,
}

impl RapcsakReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_norm <= tolerance
    }
}

/// Residual of `L_S d_J F̃ = dF̃` at a single point.
pub fn rapcsak_point(pair: &ProjectivePair, p: &TangentPoint) -> Result<DVector<f64>> {
    let spray = spray_coefficients(&pair.base, p)?;
    let tilde = evaluate(&pair.comparison, p.x.as_slice(), p.y.as_slice(), EvalRequest::ALL)?;
    let mixed = tilde.mixed_yx.expect("requested");
    let hess = tilde.y_hessian.expect("requested");
    let fx = tilde.x_gradient.expect("requested");
    Ok(mixed * &p.y - hess * (&spray.g * 2.0) - fx)
}

pub fn rapcsak_residual(pair: &ProjectivePair, samples: &[TangentPoint]) -> Result<RapcsakReport> {
    if samples.is_empty() {
        return Err(Error::Config("Rapcsák residual needs at least one sample".into()));
    }
    let mut residuals = Vec::with_capacity(samples.len());
    let mut norms = Vec::with_capacity(samples.len());
    for p in samples {
        let r = rapcsak_point(pair, p)?;
        norms.push(r.norm());
        residuals.push(r.as_slice().to_vec());
    }
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    let mean_norm = norms.iter().sum::<f64>() / norms.len() as f64;
    Ok(RapcsakReport {
        residuals,
        norms,
        max_norm,
        mean_norm,
    })
}
