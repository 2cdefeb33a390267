//! The metric catalog and the named library of closed-form fields.
//!
//! Reference for descriptor kinds (all on `R^n`, `n >= 2`):
//!
//! | kind         | `F(x, y)`                                                        | domain          |
//! |--------------|------------------------------------------------------------------|-----------------|
//! | `euclidean`  | `|y|`                                                            | `R^n`           |
//! | `riemannian` | `sqrt(yᵀ A(x) y)`                                                | `R^n`           |
//! | `randers`    | `sqrt(yᵀ A(x) y) + β(x)·y`                                       | `‖β‖_A < 1`     |
//! | `klein`      | `sqrt(|y|²(1-|x|²) + ⟨x,y⟩²) / (1-|x|²)`                         | `|x| < 1`       |
//! | `funk`       | `(sqrt(|y|²(1-|x|²) + ⟨x,y⟩²) + ⟨x,y⟩) / (1-|x|²)`               | `|x| < 1`       |
//! | `scaled`     | `c · F_inner`                                                    | inner's domain  |
//!
//! Matrix fields `A(x)`: `identity`, `constant` (user matrix, symmetric
//! positive definite) and `warped` = `diag(1, 1 + (x¹)², 1, …, 1)`.
//!
//! One-forms `β(x)`: `exact_linear` (`β = d(c·x)`), `exact_quadratic`
//! (`β = d(½ Σ wᵢ (xⁱ)²)`) and `shear` (`β = s·x² dx¹`, not closed; a
//! negative control for projective equivalence).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::diffkit::{dot, Scalar, ScalarField};
use crate::error::{Error, Result};

/// Points closer than this to a domain boundary are rejected.
pub const DOMAIN_MARGIN: f64 = 1e-9;

/// Symmetric matrix-valued function of the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MatrixField {
    Identity,
    Constant { matrix: Vec<Vec<f64>> },
    /// `diag(1, 1 + (x¹)², 1, …)`
    Warped,
}

impl MatrixField {
    pub fn eval<S: Scalar>(&self, x: &[S]) -> Vec<Vec<S>> {
        let n = x.len();
        let zero = || S::from_f64(0.0);
        let one = || S::from_f64(1.0);
        match self {
            MatrixField::Identity => (0..n)
                .map(|i| (0..n).map(|j| if i == j { one() } else { zero() }).collect())
                .collect(),
            MatrixField::Constant { matrix } => matrix
                .iter()
                .map(|row| row.iter().map(|&v| S::from_f64(v)).collect())
                .collect(),
            MatrixField::Warped => (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match (i == j, i) {
                            (false, _) => zero(),
                            (true, 1) => x[0].square() + 1.0,
                            (true, _) => one(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn eval_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let rows = self.eval(x);
        let n = x.len();
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    }

    pub fn is_constant(&self) -> bool {
        !matches!(self, MatrixField::Warped)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let MatrixField::Constant { matrix } = self {
            if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                return Err(Error::Config(format!("constant matrix must be {n}x{n}")));
            }
            let m = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
            if (&m - m.transpose()).abs().max() > 0.0 {
                return Err(Error::Config("constant matrix must be symmetric".into()));
            }
            if m.cholesky().is_none() {
                return Err(Error::Config("constant matrix must be positive definite".into()));
            }
        }
        Ok(())
    }
}

/// A one-form `β(x)` on the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum OneForm {
    /// `β = d(c·x)`, constant coefficients.
    ExactLinear { coeffs: Vec<f64> },
    /// `β = d(½ Σ wᵢ (xⁱ)²)`, i.e. `βᵢ = wᵢ xⁱ`.
    ExactQuadratic { weights: Vec<f64> },
    /// `β = s·x² dx¹`; `dβ ≠ 0`.
    Shear { strength: f64 },
}

impl OneForm {
    pub fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let n = x.len();
        match self {
            OneForm::ExactLinear { coeffs } => coeffs.iter().map(|&c| S::from_f64(c)).collect(),
            OneForm::ExactQuadratic { weights } => {
                weights.iter().zip(x).map(|(&w, xi)| xi.clone() * w).collect()
            }
            OneForm::Shear { strength } => {
                let mut b = vec![S::from_f64(0.0); n];
                b[0] = x[1].clone() * *strength;
                b
            }
        }
    }

    /// Whether `β` is the differential of a potential (hence `dβ = 0`).
    pub fn is_closed(&self) -> bool {
        !matches!(self, OneForm::Shear { .. })
    }

    fn validate(&self, n: usize) -> Result<()> {
        let len = match self {
            OneForm::ExactLinear { coeffs } => coeffs.len(),
            OneForm::ExactQuadratic { weights } => weights.len(),
            OneForm::Shear { .. } => n,
        };
        if len != n {
            return Err(Error::Config(format!("one-form has {len} components, expected {n}")));
        }
        Ok(())
    }
}

/// Serializable description of a catalog metric; resolved by [`catalog_metric`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricDescriptor {
    Euclidean,
    Riemannian { field: MatrixField },
    Randers { alpha: MatrixField, beta: OneForm },
    Klein,
    Funk,
    Scaled { factor: f64, inner: Box<MetricDescriptor> },
}

impl FromStr for MetricDescriptor {
    type Err = Error;

    /// Parses the parameter-free kinds.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(MetricDescriptor::Euclidean),
            "klein" => Ok(MetricDescriptor::Klein),
            "funk" => Ok(MetricDescriptor::Funk),
            "riemannian" | "randers" | "scaled" => Err(Error::Config(format!(
                "metric kind '{s}' needs parameters"
            ))),
            other => Err(Error::Config(format!("unknown metric kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Euclidean,
    Riemannian(MatrixField),
    Randers { alpha: MatrixField, beta: OneForm },
    Klein,
    Funk,
    Scaled { factor: f64, inner: Box<FinslerMetric> },
}

/// An evaluatable Finsler function with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FinslerMetric {
    name: String,
    dimension: usize,
    reversible: bool,
    kind: Kind,
}

impl fmt::Display for FinslerMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.dimension)
    }
}

/// Resolves a descriptor into a metric of dimension `n`, validating its
/// parameters.
pub fn catalog_metric(descriptor: &MetricDescriptor, n: usize) -> Result<FinslerMetric> {
    if n < 2 {
        return Err(Error::Config(format!("dimension must be at least 2, got {n}")));
    }
    let (name, reversible, kind) = match descriptor {
        MetricDescriptor::Euclidean => ("euclidean".to_string(), true, Kind::Euclidean),
        MetricDescriptor::Klein => ("klein".to_string(), true, Kind::Klein),
        MetricDescriptor::Funk => ("funk".to_string(), false, Kind::Funk),
        MetricDescriptor::Riemannian { field } => {
            field.validate(n)?;
            (format!("riemannian[{}]", field_label(field)), true, Kind::Riemannian(field.clone()))
        }
        MetricDescriptor::Randers { alpha, beta } => {
            alpha.validate(n)?;
            beta.validate(n)?;
            let kind = Kind::Randers {
                alpha: alpha.clone(),
                beta: beta.clone(),
            };
            (format!("randers[{}]", field_label(alpha)), false, kind)
        }
        MetricDescriptor::Scaled { factor, inner } => {
            if !(factor.is_finite() && *factor > 0.0) {
                return Err(Error::Config(format!("scale factor must be positive, got {factor}")));
            }
            let inner = catalog_metric(inner, n)?;
            (
                format!("scaled[{factor}]"),
                inner.reversible,
                Kind::Scaled {
                    factor: *factor,
                    inner: Box::new(inner),
                },
            )
        }
    };
    let metric = FinslerMetric {
        name,
        dimension: n,
        reversible,
        kind,
    };
    if let Kind::Randers { .. } = metric.kind {
        metric.probe_randers()?;
    }
    Ok(metric)
}

fn field_label(field: &MatrixField) -> &'static str {
    match field {
        MatrixField::Identity => "identity",
        MatrixField::Constant { .. } => "constant",
        MatrixField::Warped => "warped",
    }
}

impl FinslerMetric {
    pub fn euclidean(n: usize) -> Self {
        catalog_metric(&MetricDescriptor::Euclidean, n).expect("valid dimension")
    }

    pub fn klein(n: usize) -> Self {
        catalog_metric(&MetricDescriptor::Klein, n).expect("valid dimension")
    }

    pub fn funk(n: usize) -> Self {
        catalog_metric(&MetricDescriptor::Funk, n).expect("valid dimension")
    }

    /// `c·F`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Config(format!("scale factor must be positive, got {factor}")));
        }
        Ok(FinslerMetric {
            name: format!("scaled[{factor}]"),
            dimension: self.dimension,
            reversible: self.reversible,
            kind: Kind::Scaled {
                factor,
                inner: Box::new(self.clone()),
            },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    /// False only for Randers metrics built on a non-closed one-form.
    pub fn has_closed_beta(&self) -> bool {
        match &self.kind {
            Kind::Randers { beta, .. } => beta.is_closed(),
            Kind::Scaled { inner, .. } => inner.has_closed_beta(),
            _ => true,
        }
    }

    /// Distance-like margin to the domain boundary; `+inf` for global metrics.
    /// A point is in the domain iff the margin exceeds [`DOMAIN_MARGIN`].
    pub fn boundary_margin(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Euclidean | Kind::Riemannian(_) => f64::INFINITY,
            Kind::Klein | Kind::Funk => 1.0 - dot(x, x).sqrt(),
            Kind::Randers { alpha, beta } => 1.0 - beta_norm(alpha, beta, x),
            Kind::Scaled { inner, .. } => inner.boundary_margin(x),
        }
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dimension && self.boundary_margin(x) > DOMAIN_MARGIN
    }

    fn probe_randers(&self) -> Result<()> {
        let n = self.dimension;
        let mut probes = vec![vec![0.0; n]];
        for i in 0..n {
            for s in [-1.0, 1.0] {
                let mut p = vec![0.0; n];
                p[i] = s;
                probes.push(p);
            }
        }
        if let Kind::Randers { alpha, beta } = &self.kind {
            for p in &probes {
                let norm = beta_norm(alpha, beta, p);
                if !(norm < 1.0) {
                    return Err(Error::Config(format!(
                        "randers one-form has ‖β‖_α = {norm} ≥ 1 at probe point {p:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn beta_norm(alpha: &MatrixField, beta: &OneForm, x: &[f64]) -> f64 {
    let a = alpha.eval_matrix(x);
    let b = nalgebra::DVector::from_vec(beta.eval(x));
    match a.try_inverse() {
        Some(inv) => (b.transpose() * inv * &b)[(0, 0)].max(0.0).sqrt(),
        None => f64::INFINITY,
    }
}

fn quadratic_form<S: Scalar>(a: &[Vec<S>], y: &[S]) -> S {
    let mut acc = S::from_f64(0.0);
    for (i, row) in a.iter().enumerate() {
        for (j, aij) in row.iter().enumerate() {
            acc = acc + aij.clone() * y[i].clone() * y[j].clone();
        }
    }
    acc
}

impl ScalarField for FinslerMetric {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        match &self.kind {
            Kind::Euclidean => dot(y, y).sqrt(),
            Kind::Riemannian(field) => quadratic_form(&field.eval(x), y).sqrt(),
            Kind::Randers { alpha, beta } => {
                quadratic_form(&alpha.eval(x), y).sqrt() + dot(&beta.eval(x), y)
            }
            Kind::Klein => {
                let gap = S::from_f64(1.0) - dot(x, x);
                let xy = dot(x, y);
                (dot(y, y) * gap.clone() + xy.square()).sqrt() / gap
            }
            Kind::Funk => {
                let gap = S::from_f64(1.0) - dot(x, x);
                let xy = dot(x, y);
                ((dot(y, y) * gap.clone() + xy.square()).sqrt() + xy) / gap
            }
            Kind::Scaled { factor, inner } => inner.eval(x, y) * *factor,
        }
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::Config(format!(
                "{}: expected dimension {}, got {}",
                self.name,
                self.dimension,
                x.len()
            )));
        }
        let margin = self.boundary_margin(x);
        if margin > DOMAIN_MARGIN {
            Ok(())
        } else {
            Err(Error::domain(
                self.name.clone(),
                format!("x = {x:?} has boundary margin {margin:e}"),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(m: &FinslerMetric, x: &[f64], y: &[f64]) -> f64 {
        m.value(x, y).unwrap()
    }

    #[test]
    fn base_values() {
        assert_eq!(value(&FinslerMetric::euclidean(2), &[1.0, 1.0], &[3.0, 4.0]), 5.0);
        assert_eq!(value(&FinslerMetric::klein(2), &[0.0, 0.0], &[3.0, 4.0]), 5.0);
        let funk = FinslerMetric::funk(2);
        assert_eq!(value(&funk, &[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(value(&funk, &[0.0, 0.0], &[-3.0, -4.0]), 5.0);
        // at x = (1/2, 0): (sqrt(3/4 + 1/4) ± 1/2) / (3/4)
        let fwd = value(&funk, &[0.5, 0.0], &[1.0, 0.0]);
        let bwd = value(&funk, &[0.5, 0.0], &[-1.0, 0.0]);
        assert!((fwd - 2.0).abs() < 1e-15);
        assert!((bwd - 2.0 / 3.0).abs() < 1e-15);
        assert!(!funk.is_reversible());
    }

    #[test]
    fn klein_off_origin() {
        // |y|²(1-|x|²) + ⟨x,y⟩² = 1·0.91 + 0.09 at x=(0.3,0), y=(1,0)
        let v = value(&FinslerMetric::klein(2), &[0.3, 0.0], &[1.0, 0.0]);
        assert!((v - 1.0 / 0.91).abs() < 1e-15);
    }

    #[test]
    fn domain_margin_enforced() {
        let k = FinslerMetric::klein(2);
        assert!(k.check_domain(&[0.999, 0.0]).is_ok());
        assert!(k.check_domain(&[1.0 - 5e-10, 0.0]).unwrap_err().is_domain());
        assert!(k.check_domain(&[1.2, 0.0]).unwrap_err().is_domain());
        assert!(FinslerMetric::euclidean(2).check_domain(&[1e6, 1e6]).is_ok());
    }

    #[test]
    fn descriptor_errors() {
        assert!(matches!("hyperbolic".parse::<MetricDescriptor>(), Err(Error::Config(_))));
        assert!(matches!("randers".parse::<MetricDescriptor>(), Err(Error::Config(_))));
        assert_eq!("funk".parse::<MetricDescriptor>().unwrap(), MetricDescriptor::Funk);
        let bad_scale = MetricDescriptor::Scaled {
            factor: 0.0,
            inner: Box::new(MetricDescriptor::Euclidean),
        };
        assert!(matches!(catalog_metric(&bad_scale, 2), Err(Error::Config(_))));
        let strong = MetricDescriptor::Randers {
            alpha: MatrixField::Identity,
            beta: OneForm::ExactLinear {
                coeffs: vec![0.8, 0.8],
            },
        };
        assert!(matches!(catalog_metric(&strong, 2), Err(Error::Config(_))));
        assert!(matches!(
            catalog_metric(&MetricDescriptor::Euclidean, 1),
            Err(Error::Config(_))
        ));
        let asym = MetricDescriptor::Riemannian {
            field: MatrixField::Constant {
                matrix: vec![vec![1.0, 0.1], vec![0.0, 1.0]],
            },
        };
        assert!(matches!(catalog_metric(&asym, 2), Err(Error::Config(_))));
    }

    #[test]
    fn randers_value_and_flags() {
        let d = MetricDescriptor::Randers {
            alpha: MatrixField::Identity,
            beta: OneForm::ExactLinear {
                coeffs: vec![0.1, 0.0],
            },
        };
        let m = catalog_metric(&d, 2).unwrap();
        assert!((value(&m, &[0.3, 0.3], &[3.0, 4.0]) - 5.3).abs() < 1e-15);
        assert!(m.has_closed_beta());
        let shear = MetricDescriptor::Randers {
            alpha: MatrixField::Identity,
            beta: OneForm::Shear { strength: 0.3 },
        };
        let m = catalog_metric(&shear, 2).unwrap();
        assert!(!m.has_closed_beta());
        assert!(!m.in_domain(&[0.0, 5.0]));
    }
}
