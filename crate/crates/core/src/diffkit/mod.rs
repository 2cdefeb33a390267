//! Forward-mode differentiation of scalar fields `F(x, y)` on the slit
//! tangent bundle.
//!
//! Every tensor downstream (`g`, `h`, spray coefficients, Rapcsák residuals)
//! is assembled from the jets produced here. Derivatives are exact up to
//! rounding: each request runs a single [`HyperDual`] pass seeded on `y`, on
//! `x`, or on both (`2n` variables) when mixed derivatives are needed.

mod dual;

pub use dual::{dot, HyperDual, Scalar};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Values of `F` below this are treated as a vanished velocity.
pub const DEGENERATE_VALUE: f64 = 1e-13;

/// A scalar field on `TM`, evaluated generically so that the same formula
/// yields plain values or dual-number jets.
pub trait ScalarField {
    fn dimension(&self) -> usize;

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S;

    /// Rejects base points outside the field's domain.
    fn check_domain(&self, x: &[f64]) -> Result<()>;

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_args(self, x, y)?;
        Ok(self.eval(x, y))
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        (**self).eval(x, y)
    }
    fn check_domain(&self, x: &[f64]) -> Result<()> {
        (**self).check_domain(x)
    }
}

/// `F²` for a field `F`.
#[derive(Debug, Clone, Copy)]
pub struct Squared<T>(pub T);

impl<T: ScalarField> ScalarField for Squared<T> {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        self.0.eval(x, y).square()
    }
    fn check_domain(&self, x: &[f64]) -> Result<()> {
        self.0.check_domain(x)
    }
}

/// One derivative group of `F(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Derivative {
    Value,
    YGradient,
    YHessian,
    XGradient,
    /// `∂²F/∂y^i∂x^j`, rows indexed by `y`, columns by `x`.
    MixedYX,
}

/// Which derivative groups a caller needs from [`evaluate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalRequest {
    pub value: bool,
    pub y_gradient: bool,
    pub y_hessian: bool,
    pub x_gradient: bool,
    pub mixed_yx: bool,
}

impl EvalRequest {
    pub const ALL: EvalRequest = EvalRequest {
        value: true,
        y_gradient: true,
        y_hessian: true,
        x_gradient: true,
        mixed_yx: true,
    };

    pub fn of(parts: &[Derivative]) -> Self {
        let mut req = EvalRequest::default();
        for part in parts {
            match part {
                Derivative::Value => req.value = true,
                Derivative::YGradient => req.y_gradient = true,
                Derivative::YHessian => req.y_hessian = true,
                Derivative::XGradient => req.x_gradient = true,
                Derivative::MixedYX => req.mixed_yx = true,
            }
        }
        req
    }

    pub fn is_empty(&self) -> bool {
        !(self.value || self.y_gradient || self.y_hessian || self.x_gradient || self.mixed_yx)
    }

    fn needs_y(&self) -> bool {
        self.y_gradient || self.y_hessian || self.mixed_yx
    }

    fn needs_x(&self) -> bool {
        self.x_gradient || self.mixed_yx
    }
}

/// The derivative groups of one field at one point; groups that were not
/// requested are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub y_gradient: Option<DVector<f64>>,
    pub y_hessian: Option<DMatrix<f64>>,
    pub x_gradient: Option<DVector<f64>>,
    pub mixed_yx: Option<DMatrix<f64>>,
}

/// Variable layout of a dual pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seeding {
    /// `y` seeded as variables `0..n`, `x` held fixed.
    Velocity,
    /// `x` seeded as variables `0..n`, `y` held fixed.
    Position,
    /// `x` as variables `0..n`, `y` as `n..2n`.
    Both,
}

fn check_args<T: ScalarField + ?Sized>(field: &T, x: &[f64], y: &[f64]) -> Result<()> {
    let n = field.dimension();
    if x.len() != n || y.len() != n {
        return Err(Error::Config(format!(
            "expected points of dimension {n}, got x:{} y:{}",
            x.len(),
            y.len()
        )));
    }
    if y.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateVelocity("y = 0".into()));
    }
    if y.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateVelocity("non-finite coordinates".into()));
    }
    field.check_domain(x)
}

/// Runs one dual pass of `field` at `(x, y)` and returns the raw hyper-dual.
///
/// Fails with `DegenerateVelocity` when `y = 0` or the field value drops
/// below [`DEGENERATE_VALUE`].
pub fn evaluate_dual<T: ScalarField + ?Sized>(
    field: &T,
    x: &[f64],
    y: &[f64],
    seeding: Seeding,
) -> Result<HyperDual> {
    check_args(field, x, y)?;
    let n = field.dimension();
    let (xs, ys) = match seeding {
        Seeding::Velocity => (HyperDual::lift(x), HyperDual::seed(y, 0, n)),
        Seeding::Position => (HyperDual::seed(x, 0, n), HyperDual::lift(y)),
        Seeding::Both => (HyperDual::seed(x, 0, 2 * n), HyperDual::seed(y, n, 2 * n)),
    };
    let out = field.eval(&xs, &ys);
    guard_value(out.real())?;
    Ok(out)
}

fn guard_value(v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::DegenerateVelocity(format!("field value {v}")));
    }
    if v < DEGENERATE_VALUE {
        return Err(Error::DegenerateVelocity(format!(
            "field value {v:e} below {DEGENERATE_VALUE:e}"
        )));
    }
    Ok(())
}

/// Block views into a `2n`-variable dual (`x` first, then `y`).
pub(crate) struct Blocks<'a> {
    pub dual: &'a HyperDual,
    pub n: usize,
}

impl Blocks<'_> {
    pub fn y_gradient(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| self.dual.d(self.n + i))
    }
    pub fn x_gradient(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| self.dual.d(i))
    }
    pub fn y_hessian(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.dual.dd(self.n + i, self.n + j))
    }
    pub fn mixed_yx(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.dual.dd(self.n + i, j))
    }
}

/// Evaluates the requested derivative groups with the smallest dual pass
/// that covers them.
pub fn evaluate<T: ScalarField + ?Sized>(
    field: &T,
    x: &[f64],
    y: &[f64],
    request: EvalRequest,
) -> Result<FieldJet> {
    if request.is_empty() {
        return Err(Error::Config("empty derivative request".into()));
    }
    let n = field.dimension();
    let seeding = match (request.needs_x(), request.needs_y()) {
        (true, true) => Seeding::Both,
        (true, false) => Seeding::Position,
        _ => Seeding::Velocity,
    };
    let dual = evaluate_dual(field, x, y, seeding)?;
    let vec = |offset: usize| DVector::from_fn(n, |i, _| dual.d(offset + i));
    let mat = |ro: usize, co: usize| DMatrix::from_fn(n, n, |i, j| dual.dd(ro + i, co + j));
    let (x_off, y_off) = match seeding {
        Seeding::Velocity => (usize::MAX, 0),
        Seeding::Position => (0, usize::MAX),
        Seeding::Both => (0, n),
    };
    Ok(FieldJet {
        value: dual.real(),
        y_gradient: request.y_gradient.then(|| vec(y_off)),
        y_hessian: request.y_hessian.then(|| mat(y_off, y_off)),
        x_gradient: request.x_gradient.then(|| vec(x_off)),
        mixed_yx: request.mixed_yx.then(|| mat(y_off, x_off)),
    })
}

/// Value, `y`-gradient and `y`-Hessian at fixed `x`.
pub fn y_jet2<T: ScalarField + ?Sized>(
    field: &T,
    x: &[f64],
    y: &[f64],
) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
    let jet = evaluate(
        field,
        x,
        y,
        EvalRequest::of(&[Derivative::Value, Derivative::YGradient, Derivative::YHessian]),
    )?;
    Ok((jet.value, jet.y_gradient.unwrap(), jet.y_hessian.unwrap()))
}

/// `∂F/∂x` at fixed `y`.
pub fn x_gradient<T: ScalarField + ?Sized>(field: &T, x: &[f64], y: &[f64]) -> Result<DVector<f64>> {
    let jet = evaluate(field, x, y, EvalRequest::of(&[Derivative::XGradient]))?;
    Ok(jet.x_gradient.unwrap())
}

/// `∂²F/∂y^i∂x^j` from a single `2n`-variable pass.
pub fn mixed_xy_hessian<T: ScalarField + ?Sized>(
    field: &T,
    x: &[f64],
    y: &[f64],
) -> Result<DMatrix<f64>> {
    let jet = evaluate(field, x, y, EvalRequest::of(&[Derivative::MixedYX]))?;
    Ok(jet.mixed_yx.unwrap())
}
