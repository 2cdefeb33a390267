//! Double-double arithmetic for the finite-difference stencils.
//!
//! A second difference with step `h` divides the rounding error of `F` by
//! `h²`; in plain `f64` that alone is about `1e-6` relative at `h = 1e-5`.
//! Evaluating the stencil in ~106-bit arithmetic pushes rounding far below the
//! `O(h²)` truncation error, so the estimate is limited by the step alone.

use twofloat::TwoFloat;

use crate::diffkit::Scalar;

impl Scalar for TwoFloat {
    fn from_f64(v: f64) -> Self {
        TwoFloat::from(v)
    }
    fn value(&self) -> f64 {
        f64::from(*self)
    }
    fn sqrt(&self) -> Self {
        TwoFloat::sqrt(*self)
    }
    fn exp(&self) -> Self {
        TwoFloat::exp(*self)
    }
    fn ln(&self) -> Self {
        TwoFloat::ln(*self)
    }
    fn sin(&self) -> Self {
        TwoFloat::sin(*self)
    }
    fn cos(&self) -> Self {
        TwoFloat::cos(*self)
    }
}
