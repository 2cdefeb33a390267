use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::FinslerMetric;
use crate::diffkit::{evaluate_dual, Blocks, Scalar, ScalarField, Seeding};
use crate::error::{Error, Result};
use crate::linalg;

/// A base point `x` with a nonzero velocity `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentPoint {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl TangentPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Config(format!(
                "x has dimension {} but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Config("tangent points need n >= 2".into()));
        }
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::DegenerateVelocity("y = 0".into()));
        }
        Ok(TangentPoint {
            x: DVector::from_vec(x),
            y: DVector::from_vec(y),
        })
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    /// Same base point, velocity scaled by `lambda`.
    pub fn rescaled(&self, lambda: f64) -> TangentPoint {
        TangentPoint {
            x: self.x.clone(),
            y: &self.y * lambda,
        }
    }
}

/// All derivative data of one metric at one tangent point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub f: f64,
    pub f_y: DVector<f64>,
    pub f_x: DVector<f64>,
    /// `½ ∂²F²/∂y∂y`
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// Angular metric `F ∂²F/∂y∂y`.
    pub h: DMatrix<f64>,
    pub det_g: f64,
    /// `∂²F²/∂y^i∂x^j`, rows by `y`.
    pub f2_yx: DMatrix<f64>,
    pub f2_x: DVector<f64>,
    pub y: DVector<f64>,
}

/// Assembles the jet from one `2n`-variable dual pass of `F`; `F²` is the
/// dual square of that pass.
pub fn metric_jet(metric: &FinslerMetric, p: &TangentPoint) -> Result<MetricJet> {
    let n = metric.dimension();
    if p.dimension() != n {
        return Err(Error::Config(format!(
            "point dimension {} does not match metric {}",
            p.dimension(),
            metric
        )));
    }
    let dual = evaluate_dual(metric, p.x.as_slice(), p.y.as_slice(), Seeding::Both)?;
    let f2 = dual.square();
    let fb = Blocks { dual: &dual, n };
    let f2b = Blocks { dual: &f2, n };

    let f = dual.real();
    let g = f2b.y_hessian() * 0.5;
    let h = fb.y_hessian() * f;
    let factored = linalg::factor(&g)?;
    Ok(MetricJet {
        f,
        f_y: fb.y_gradient(),
        f_x: fb.x_gradient(),
        g,
        g_inv: factored.inverse,
        h,
        det_g: factored.det,
        f2_yx: f2b.mixed_yx(),
        f2_x: f2b.x_gradient(),
        y: p.y.clone(),
    })
}

/// Absolute residuals of the identities every jet must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JetResiduals {
    /// `max |g - h - F_y ⊗ F_y|`
    pub angular_split: f64,
    /// `max |h y| / (‖h‖ ‖y‖)`
    pub kernel: f64,
    /// `max |g y - F F_y| / (F ‖F_y‖)`
    pub euler: f64,
    /// `max |g g⁻¹ - I|`
    pub inverse: f64,
}

impl MetricJet {
    pub fn dimension(&self) -> usize {
        self.y.len()
    }

    pub fn residuals(&self) -> JetResiduals {
        let n = self.dimension();
        let split = &self.g - &self.h - &self.f_y * self.f_y.transpose();
        let hy = &self.h * &self.y;
        let hscale = self.h.norm() * self.y.norm();
        let euler = &self.g * &self.y - &self.f_y * self.f;
        let inv = &self.g * &self.g_inv - DMatrix::<f64>::identity(n, n);
        JetResiduals {
            angular_split: split.abs().max(),
            kernel: hy.abs().max() / hscale.max(f64::MIN_POSITIVE),
            euler: euler.abs().max() / (self.f * self.f_y.norm()).max(f64::MIN_POSITIVE),
            inverse: inv.abs().max(),
        }
    }
}

/// Eigenvalue magnitudes of the angular metric and its numerical null count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    /// Ascending `|λ|`.
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub null_count: usize,
}

impl RankReport {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len() - self.null_count
    }
}

/// Relative threshold below which an eigenvalue of `h` counts as zero.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// Checks that `h` has rank exactly `n - 1`.
pub fn angular_rank_check(jet: &MetricJet) -> Result<RankReport> {
    let eig = SymmetricEigen::new(jet.h.clone());
    let mut mags: Vec<f64> = eig.eigenvalues.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let largest = mags.last().copied().unwrap_or(0.0);
    let threshold = RANK_THRESHOLD * largest;
    let null_count = mags.iter().filter(|v| **v <= threshold).count();
    match null_count {
        1 => Ok(RankReport {
            eigenvalues: mags,
            threshold,
            null_count,
        }),
        0 => Err(Error::InvariantViolation {
            what: "smallest angular eigenvalue",
            value: mags[0],
            bound: threshold,
        }),
        k => Err(Error::DegenerateAngularMetric { deficit: k }),
    }
}
