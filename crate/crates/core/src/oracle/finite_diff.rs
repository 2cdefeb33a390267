use nalgebra::{DMatrix, DVector};
use twofloat::TwoFloat;

use crate::diffkit::{Derivative, FieldJet, Scalar, ScalarField};
use crate::error::{Error, Result};
use crate::linalg;

/// A central-difference estimate, shaped by the derivative requested.
#[derive(Debug, Clone, PartialEq)]
pub enum FdValue {
    Scalar(f64),
    Vector(DVector<f64>),
    Matrix(DMatrix<f64>),
}

impl FdValue {
    pub fn into_vector(self) -> Option<DVector<f64>> {
        match self {
            FdValue::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_matrix(self) -> Option<DMatrix<f64>> {
        match self {
            FdValue::Matrix(m) => Some(m),
            _ => None,
        }
    }
}

struct Stencil<'a, T: ScalarField + ?Sized> {
    field: &'a T,
    x: Vec<f64>,
    y: Vec<f64>,
    h: f64,
}

impl<T: ScalarField + ?Sized> Stencil<'_, T> {
    fn n(&self) -> usize {
        self.x.len()
    }

    // (index in the 2n-vector (x, y), signed step count); evaluated in
    // double-double so the differences below lose nothing to rounding
    fn at(&self, moves: &[(usize, f64)]) -> TwoFloat {
        let n = self.n();
        let mut x: Vec<TwoFloat> = self.x.iter().map(|&v| TwoFloat::from(v)).collect();
        let mut y: Vec<TwoFloat> = self.y.iter().map(|&v| TwoFloat::from(v)).collect();
        for &(k, s) in moves {
            if k < n {
                x[k] += s * self.h;
            } else {
                y[k - n] += s * self.h;
            }
        }
        self.field.eval(&x, &y)
    }

    fn value(&self) -> f64 {
        self.at(&[]).value()
    }

    fn first(&self, k: usize) -> f64 {
        ((self.at(&[(k, 1.0)]) - self.at(&[(k, -1.0)])) / (2.0 * self.h)).value()
    }

    fn second(&self, a: usize, b: usize) -> f64 {
        let h2 = self.h * self.h;
        let d = if a == b {
            (self.at(&[(a, 1.0)]) - self.at(&[]) * 2.0 + self.at(&[(a, -1.0)])) / h2
        } else {
            (self.at(&[(a, 1.0), (b, 1.0)]) - self.at(&[(a, 1.0), (b, -1.0)])
                - self.at(&[(a, -1.0), (b, 1.0)])
                + self.at(&[(a, -1.0), (b, -1.0)]))
                / (4.0 * h2)
        };
        d.value()
    }
}

fn stencil<'a, T: ScalarField + ?Sized>(
    field: &'a T,
    x: &[f64],
    y: &[f64],
    step: f64,
) -> Result<Stencil<'a, T>> {
    let n = field.dimension();
    if x.len() != n || y.len() != n {
        return Err(Error::Config(format!(
            "finite differences on a {n}-dimensional field given x of length {} and y of length {}",
            x.len(),
            y.len()
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("finite-difference step {step} must be positive")));
    }
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(y_norm > 2.0 * step) {
        return Err(Error::DegenerateVelocity(format!(
            "|y| = {y_norm:e} within twice the finite-difference step"
        )));
    }
    field.check_domain(x)?;
    let mut probe = x.to_vec();
    for i in 0..n {
        for s in [-2.0, 2.0] {
            probe[i] = x[i] + s * step;
            field.check_domain(&probe).map_err(|e| match e {
                Error::Domain { metric, detail } => Error::Domain {
                    metric,
                    detail: format!("finite-difference margin 2·{step:e} violated: {detail}"),
                },
                other => other,
            })?;
        }
        probe[i] = x[i];
    }
    Ok(Stencil {
        field,
        x: x.to_vec(),
        y: y.to_vec(),
        h: step,
    })
}

/// Central-difference estimate of one derivative group of `field` at `(x, y)`.
///
/// The base point must lie at least `2·step` inside the domain in every
/// coordinate direction.
pub fn fd_derivative<T: ScalarField + ?Sized>(
    field: &T,
    x: &[f64],
    y: &[f64],
    which: Derivative,
    step: f64,
) -> Result<FdValue> {
    let s = stencil(field, x, y, step)?;
    let n = s.n();
    Ok(match which {
        Derivative::Value => FdValue::Scalar(s.value()),
        Derivative::YGradient => FdValue::Vector(DVector::from_fn(n, |i, _| s.first(n + i))),
        Derivative::XGradient => FdValue::Vector(DVector::from_fn(n, |i, _| s.first(i))),
        Derivative::YHessian => FdValue::Matrix(DMatrix::from_fn(n, n, |i, j| s.second(n + i, n + j))),
        Derivative::MixedYX => FdValue::Matrix(DMatrix::from_fn(n, n, |i, j| s.second(n + i, j))),
    })
}

/// Every derivative group at once, in the same layout as the jet evaluator.
pub fn fd_jet<T: ScalarField + ?Sized>(field: &T, x: &[f64], y: &[f64], step: f64) -> Result<FieldJet> {
    let s = stencil(field, x, y, step)?;
    let n = s.n();
    Ok(FieldJet {
        value: s.value(),
        y_gradient: Some(DVector::from_fn(n, |i, _| s.first(n + i))),
        y_hessian: Some(DMatrix::from_fn(n, n, |i, j| s.second(n + i, n + j))),
        x_gradient: Some(DVector::from_fn(n, |i, _| s.first(i))),
        mixed_yx: Some(DMatrix::from_fn(n, n, |i, j| s.second(n + i, j))),
    })
}

/// Christoffel symbols of the second kind, `Γ^i_{jk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    /// `½ Γ^i_{jk} y^j y^k`, the spray coefficients of the quadratic metric.
    pub fn half_contract(&self, y: &[f64]) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |i, _| {
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    acc += self.get(i, j, k) * y[j] * y[k];
                }
            }
            0.5 * acc
        })
    }
}

/// `Γ^i_{jk} = ½ A^{il} (∂_j A_{lk} + ∂_k A_{lj} - ∂_l A_{jk})` with the
/// partial derivatives of `A` taken by central differences.
pub fn christoffel_oracle<A>(a: A, x: &[f64], step: f64) -> Result<Christoffel>
where
    A: Fn(&[f64]) -> DMatrix<f64>,
{
    let n = x.len();
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("finite-difference step {step} must be positive")));
    }
    let inv = linalg::factor(&a(x))?.inverse;
    let partial: Vec<DMatrix<f64>> = (0..n)
        .map(|m| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[m] += step;
            xm[m] -= step;
            (a(&xp) - a(&xm)) / (2.0 * step)
        })
        .collect();
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += inv[(i, l)] * (partial[j][(l, k)] + partial[k][(l, j)] - partial[l][(j, k)]);
                }
                data[(i * n + j) * n + k] = 0.5 * acc;
            }
        }
    }
    Ok(Christoffel { n, data })
}
