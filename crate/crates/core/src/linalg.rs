//! Small dense helpers on top of nalgebra's LU.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Smallest admissible ratio of the smallest to the largest LU pivot.
pub const PIVOT_RATIO_MIN: f64 = 1e-12;

/// Determinant and inverse of a square matrix, rejecting near-singular input.
#[derive(Debug, Clone)]
pub struct Factored {
    pub det: f64,
    pub inverse: DMatrix<f64>,
    pub pivot_ratio: f64,
}

/// Ratio `min |u_ii| / max |u_ii|` of an LU factorization with partial pivoting.
fn pivot_ratio(u: &DMatrix<f64>) -> f64 {
    let diag = u.diagonal();
    let max = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn factor(m: &DMatrix<f64>) -> Result<Factored> {
    assert!(m.is_square(), "factor expects a square matrix");
    let lu = m.clone().lu();
    let det = lu.determinant();
    let ratio = pivot_ratio(&lu.u());
    if !(ratio >= PIVOT_RATIO_MIN) || !det.is_finite() {
        return Err(Error::SingularMetric {
            det,
            pivot_ratio: ratio,
        });
    }
    let inverse = lu.try_inverse().ok_or(Error::SingularMetric {
        det,
        pivot_ratio: ratio,
    })?;
    Ok(Factored {
        det,
        inverse,
        pivot_ratio: ratio,
    })
}

/// Plain LU determinant, no singularity guard.
pub fn det(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}
