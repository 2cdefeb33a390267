//! Second-order forward-mode dual numbers.
//!
//! A [`HyperDual`] carries a value, its gradient with respect to `k` seeded
//! variables, and the Hessian stored as a packed upper triangle. Because only
//! one triangle is ever stored, the Hessian is symmetric by construction.
//!
//! A number with an empty gradient is a constant; binary operations broadcast
//! constants against seeded numbers so metric formulas can freely mix the two.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by `f64` and [`HyperDual`], so that a metric
/// formula is written once and evaluated either plainly or with derivatives.
pub trait Scalar:
    Clone
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn recip(&self) -> Self {
        Self::from_f64(1.0) / self.clone()
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
}

/// Euclidean inner product of two slices of scalars.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::from_f64(0.0);
    for (ai, bi) in a.iter().zip(b) {
        acc = acc + ai.clone() * bi.clone();
    }
    acc
}

/// Value, gradient and symmetric Hessian with respect to `nvars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperDual {
    value: f64,
    grad: Vec<f64>,
    // packed upper triangle, row-major: (0,0) (0,1) .. (0,k-1) (1,1) ..
    hess: Vec<f64>,
}

#[inline]
fn packed_len(k: usize) -> usize {
    k * (k + 1) / 2
}

#[inline]
fn packed_index(k: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * k - i * (i + 1) / 2 + j
}

impl HyperDual {
    pub fn constant(value: f64) -> Self {
        HyperDual {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    /// The `index`-th independent variable out of `nvars`, with value `value`.
    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range {nvars}");
        let mut grad = vec![0.0; nvars];
        grad[index] = 1.0;
        HyperDual {
            value,
            grad,
            hess: vec![0.0; packed_len(nvars)],
        }
    }

    /// Seeds `values` as variables `offset..offset + values.len()` out of `nvars`.
    pub fn seed(values: &[f64], offset: usize, nvars: usize) -> Vec<Self> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| HyperDual::variable(v, offset + i, nvars))
            .collect()
    }

    pub fn lift(values: &[f64]) -> Vec<Self> {
        values.iter().map(|&v| HyperDual::constant(v)).collect()
    }

    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    pub fn is_constant(&self) -> bool {
        self.grad.is_empty()
    }

    pub fn real(&self) -> f64 {
        self.value
    }

    /// Gradient entry; zero for constants.
    pub fn d(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    /// Hessian entry; `dd(i, j) == dd(j, i)` bit for bit.
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        self.hess[packed_index(self.nvars(), i, j)]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    /// Applies a scalar function given its value and first two derivatives at
    /// `self.value`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        if self.is_constant() {
            return HyperDual::constant(f);
        }
        let k = self.nvars();
        let grad: Vec<f64> = self.grad.iter().map(|g| df * g).collect();
        let mut hess = Vec::with_capacity(packed_len(k));
        let mut idx = 0;
        for i in 0..k {
            for j in i..k {
                hess.push(df * self.hess[idx] + d2f * self.grad[i] * self.grad[j]);
                idx += 1;
            }
        }
        HyperDual {
            value: f,
            grad,
            hess,
        }
    }

    fn combine(a: &Self, b: &Self, sa: f64, sb: f64) -> Self {
        // sa * a + sb * b
        let value = sa * a.value + sb * b.value;
        match (a.is_constant(), b.is_constant()) {
            (true, true) => HyperDual::constant(value),
            (false, true) => HyperDual {
                value,
                grad: a.grad.iter().map(|g| sa * g).collect(),
                hess: a.hess.iter().map(|h| sa * h).collect(),
            },
            (true, false) => HyperDual {
                value,
                grad: b.grad.iter().map(|g| sb * g).collect(),
                hess: b.hess.iter().map(|h| sb * h).collect(),
            },
            (false, false) => {
                assert_eq!(a.nvars(), b.nvars(), "mixed variable counts");
                HyperDual {
                    value,
                    grad: a.grad.iter().zip(&b.grad).map(|(x, y)| sa * x + sb * y).collect(),
                    hess: a.hess.iter().zip(&b.hess).map(|(x, y)| sa * x + sb * y).collect(),
                }
            }
        }
    }

    fn product(a: &Self, b: &Self) -> Self {
        let value = a.value * b.value;
        match (a.is_constant(), b.is_constant()) {
            (true, true) => HyperDual::constant(value),
            (false, true) => Self::combine(a, a, b.value, 0.0).with_value(value),
            (true, false) => Self::combine(b, b, a.value, 0.0).with_value(value),
            (false, false) => {
                assert_eq!(a.nvars(), b.nvars(), "mixed variable counts");
                let k = a.nvars();
                let grad = a
                    .grad
                    .iter()
                    .zip(&b.grad)
                    .map(|(ga, gb)| a.value * gb + b.value * ga)
                    .collect();
                let mut hess = Vec::with_capacity(packed_len(k));
                let mut idx = 0;
                for i in 0..k {
                    for j in i..k {
                        hess.push(
                            a.value * b.hess[idx]
                                + b.value * a.hess[idx]
                                + a.grad[i] * b.grad[j]
                                + a.grad[j] * b.grad[i],
                        );
                        idx += 1;
                    }
                }
                HyperDual { value, grad, hess }
            }
        }
    }

    fn with_value(mut self, value: f64) -> Self {
        self.value = value;
        self
    }
}

impl Scalar for HyperDual {
    fn from_f64(v: f64) -> Self {
        HyperDual::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(&self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn square(&self) -> Self {
        HyperDual::product(self, self)
    }
    fn recip(&self) -> Self {
        let v = self.value;
        let r = 1.0 / v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for HyperDual {
    type Output = HyperDual;
    fn add(self, rhs: HyperDual) -> HyperDual {
        HyperDual::combine(&self, &rhs, 1.0, 1.0)
    }
}

impl Sub for HyperDual {
    type Output = HyperDual;
    fn sub(self, rhs: HyperDual) -> HyperDual {
        HyperDual::combine(&self, &rhs, 1.0, -1.0)
    }
}

impl Mul for HyperDual {
    type Output = HyperDual;
    fn mul(self, rhs: HyperDual) -> HyperDual {
        HyperDual::product(&self, &rhs)
    }
}

impl Div for HyperDual {
    type Output = HyperDual;
    fn div(self, rhs: HyperDual) -> HyperDual {
        if rhs.is_constant() {
            return self / rhs.value;
        }
        HyperDual::product(&self, &rhs.recip())
    }
}

impl Neg for HyperDual {
    type Output = HyperDual;
    fn neg(self) -> HyperDual {
        self * -1.0
    }
}

impl Add<f64> for HyperDual {
    type Output = HyperDual;
    fn add(mut self, rhs: f64) -> HyperDual {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for HyperDual {
    type Output = HyperDual;
    fn sub(mut self, rhs: f64) -> HyperDual {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for HyperDual {
    type Output = HyperDual;
    fn mul(mut self, rhs: f64) -> HyperDual {
        self.value *= rhs;
        self.grad.iter_mut().for_each(|g| *g *= rhs);
        self.hess.iter_mut().for_each(|h| *h *= rhs);
        self
    }
}

impl Div<f64> for HyperDual {
    type Output = HyperDual;
    fn div(mut self, rhs: f64) -> HyperDual {
        self.value /= rhs;
        self.grad.iter_mut().for_each(|g| *g /= rhs);
        self.hess.iter_mut().for_each(|h| *h /= rhs);
        self
    }
}
