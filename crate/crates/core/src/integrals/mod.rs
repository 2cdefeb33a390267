//! The tensor `H = (F/F̃) g⁻¹ h̃`, its characteristic polynomial
//! `Q(Λ) = det(H + ΛI) = Σ f_α Λ^α`, and the closed-form expressions of
//! individual coefficients.

mod charpoly;
mod conservation;

pub use charpoly::charpoly_coefficients;
pub use conservation::{conservation_run, integral_series, ConservationRun, Drift};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{MetricJet, ProjectivePair, TangentPoint};

/// Allowed `|Q(0)|` relative to `‖H‖_F^n`.
pub const CONSTANT_TERM_TOLERANCE: f64 = 1e-10;

/// `H^i_j` at one tangent point; rank `n - 1` with kernel spanned by `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct HTensor {
    pub h: DMatrix<f64>,
}

/// The coefficients `f_1 … f_n` of `Q` and `δ_α = f_α det g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstIntegralVector {
    /// `f[α - 1] = f_α`.
    pub f: Vec<f64>,
    pub delta: Vec<f64>,
    /// `Q(0) = det H`, kept for diagnostics.
    pub constant_term: f64,
}

impl FirstIntegralVector {
    /// `f_α` for `α ∈ 1..=n`.
    pub fn alpha(&self, alpha: usize) -> f64 {
        self.f[alpha - 1]
    }

    pub fn dimension(&self) -> usize {
        self.f.len()
    }
}

/// Both jets of a pair at one point, with every derived quantity available
/// from them.
#[derive(Debug, Clone)]
pub struct PairPoint {
    pub jet: MetricJet,
    pub jet_tilde: MetricJet,
}

impl PairPoint {
    pub fn new(pair: &ProjectivePair, p: &TangentPoint) -> Result<Self> {
        let (jet, jet_tilde) = pair.jets(p)?;
        Ok(PairPoint { jet, jet_tilde })
    }

    pub fn dimension(&self) -> usize {
        self.jet.dimension()
    }

    /// `F / F̃`
    pub fn ratio(&self) -> f64 {
        self.jet.f / self.jet_tilde.f
    }

    pub fn h_tensor(&self) -> HTensor {
        HTensor {
            h: (&self.jet.g_inv * &self.jet_tilde.h) * self.ratio(),
        }
    }

    pub fn first_integrals(&self) -> Result<FirstIntegralVector> {
        let h = self.h_tensor().h;
        let n = self.dimension();
        let coeffs = charpoly_coefficients(&h)?;
        let bound = CONSTANT_TERM_TOLERANCE * h.norm().powi(n as i32);
        if coeffs[0].abs() > bound {
            return Err(Error::InvariantViolation {
                what: "Q(0) = det H",
                value: coeffs[0].abs(),
                bound,
            });
        }
        let f = coeffs[1..].to_vec();
        let delta = f.iter().map(|fa| fa * self.jet.det_g).collect();
        Ok(FirstIntegralVector {
            f,
            delta,
            constant_term: coeffs[0],
        })
    }

    /// `f_1 = (F/F̃)^{n+1} det g̃ / det g`
    pub fn f1_closed_form(&self) -> f64 {
        let n = self.dimension() as i32;
        self.ratio().powi(n + 1) * self.jet_tilde.det_g / self.jet.det_g
    }

    /// `f_{n-1} = Tr H = (F/F̃) g^{ij} h̃_{ij}`
    pub fn fn1_closed_form(&self) -> f64 {
        self.ratio() * self.jet.g_inv.component_mul(&self.jet_tilde.h).sum()
    }

    fn det_ratio_checked(&self) -> Result<f64> {
        let (d, dt) = (self.jet.det_g, self.jet_tilde.det_g);
        if d.signum() != dt.signum() {
            return Err(Error::SignMismatch { det: d, det_tilde: dt });
        }
        Ok(d / dt)
    }

    /// `μ = (det g / det g̃)^{1/(n+1)}`
    pub fn mu(&self) -> Result<f64> {
        let n = self.dimension() as f64;
        Ok(self.det_ratio_checked()?.powf(1.0 / (n + 1.0)))
    }

    /// `I₀ = μ² F̃²`
    pub fn painleve_i0(&self) -> Result<f64> {
        Ok(self.mu()?.powi(2) * self.jet_tilde.f.powi(2))
    }

    /// `F² / f_1^{2/(n+1)}`, equal to `I₀` by the closed form of `f_1`.
    pub fn painleve_i0_from_f1(&self, f1: f64) -> f64 {
        let n = self.dimension() as f64;
        self.jet.f.powi(2) / f1.powf(2.0 / (n + 1.0))
    }

    /// `I₁ = μ³ g^{ij} (g̃_{ij} g̃_{kl} - g̃_{ik} g̃_{jl}) y^k y^l`
    pub fn tm_i1(&self) -> Result<f64> {
        let mu = self.mu()?;
        let gt = &self.jet_tilde.g;
        let y = &self.jet.y;
        let w = gt * y;
        let q = y.dot(&w);
        let trace = self.jet.g_inv.component_mul(gt).sum();
        let cross = w.dot(&(&self.jet.g_inv * &w));
        Ok(mu.powi(3) * (q * trace - cross))
    }

    /// `f_{n-1} F̃³ μ³ / F`, equal to `I₁`.
    pub fn tm_i1_from_fn1(&self, fn1: f64) -> Result<f64> {
        Ok(fn1 * self.jet_tilde.f.powi(3) * self.mu()?.powi(3) / self.jet.f)
    }

    /// `K^i_j = (det g̃ / det g)^{1/(n+1)} g̃^{ik} g_{kj}`
    pub fn sarlet_k(&self) -> Result<DMatrix<f64>> {
        let n = self.dimension() as f64;
        let factor = (1.0 / self.det_ratio_checked()?).powf(1.0 / (n + 1.0));
        Ok((&self.jet_tilde.g_inv * &self.jet.g) * factor)
    }
}

pub fn build_h(pair: &ProjectivePair, p: &TangentPoint) -> Result<HTensor> {
    Ok(PairPoint::new(pair, p)?.h_tensor())
}

/// The first integrals `f_1 … f_n` at `p`.
pub fn first_integrals(pair: &ProjectivePair, p: &TangentPoint) -> Result<FirstIntegralVector> {
    PairPoint::new(pair, p)?.first_integrals()
}

pub fn f1_closed_form(pair: &ProjectivePair, p: &TangentPoint) -> Result<f64> {
    Ok(PairPoint::new(pair, p)?.f1_closed_form())
}

pub fn fn1_closed_form(pair: &ProjectivePair, p: &TangentPoint) -> Result<f64> {
    Ok(PairPoint::new(pair, p)?.fn1_closed_form())
}

pub fn mu(pair: &ProjectivePair, p: &TangentPoint) -> Result<f64> {
    PairPoint::new(pair, p)?.mu()
}

pub fn painleve_i0(pair: &ProjectivePair, p: &TangentPoint) -> Result<f64> {
    PairPoint::new(pair, p)?.painleve_i0()
}

pub fn tm_i1(pair: &ProjectivePair, p: &TangentPoint) -> Result<f64> {
    PairPoint::new(pair, p)?.tm_i1()
}

pub fn sarlet_k(pair: &ProjectivePair, p: &TangentPoint) -> Result<DMatrix<f64>> {
    PairPoint::new(pair, p)?.sarlet_k()
}

/// Every closed-form identity at one point, as relative discrepancies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossChecks {
    pub f1_rel: f64,
    pub fn1_rel: f64,
    pub i0_rel: f64,
    pub i1_rel: f64,
    pub constant_term: f64,
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl PairPoint {
    pub fn cross_checks(&self, fi: &FirstIntegralVector) -> Result<CrossChecks> {
        let n = self.dimension();
        let f1 = fi.alpha(1);
        let fn1 = fi.alpha(n - 1);
        Ok(CrossChecks {
            f1_rel: relative_gap(f1, self.f1_closed_form()),
            fn1_rel: relative_gap(fn1, self.fn1_closed_form()),
            i0_rel: relative_gap(self.painleve_i0_from_f1(f1), self.painleve_i0()?),
            i1_rel: relative_gap(self.tm_i1_from_fn1(fn1)?, self.tm_i1()?),
            constant_term: fi.constant_term,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::FinslerMetric;

    fn tp(x: &[f64], y: &[f64]) -> TangentPoint {
        TangentPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn scaled_pair_closed_forms() {
        let base = FinslerMetric::klein(3);
        let pair = ProjectivePair::new(base.clone(), base.scaled(2.0).unwrap()).unwrap();
        let p = tp(&[0.1, -0.2, 0.3], &[1.0, 0.5, -0.25]);
        let pp = PairPoint::new(&pair, &p).unwrap();
        let fi = pp.first_integrals().unwrap();
        for (got, want) in fi.f.iter().zip([4.0, 4.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{:?}", fi.f);
        }
        assert!((pp.f1_closed_form() - 4.0).abs() < 1e-12);
        assert!((pp.fn1_closed_form() - 4.0).abs() < 1e-12);
        assert!((pp.mu().unwrap() - 2f64.powf(-1.5)).abs() < 1e-14);
        let k = pp.sarlet_k().unwrap();
        assert!((k - DMatrix::identity(3, 3) * 2f64.powf(-0.5)).abs().max() < 1e-12);
    }

    #[test]
    fn identity_pair_binomials() {
        let m = FinslerMetric::funk(4);
        let pair = ProjectivePair::new(m.clone(), m).unwrap();
        let fi = first_integrals(&pair, &tp(&[0.1, 0.2, 0.0, -0.1], &[0.3, -1.0, 0.4, 0.2])).unwrap();
        for alpha in 1..=4 {
            assert!((fi.alpha(alpha) - binomial(3, alpha - 1)).abs() < 1e-11);
        }
        let i1 = tm_i1(&pair, &tp(&[0.1, 0.2, 0.0, -0.1], &[0.3, -1.0, 0.4, 0.2])).unwrap();
        let f = crate::diffkit::ScalarField::value(&pair.base, &[0.1, 0.2, 0.0, -0.1], &[0.3, -1.0, 0.4, 0.2])
            .unwrap();
        assert!((i1 - 3.0 * f * f).abs() < 1e-11 * f * f);
    }

    #[test]
    fn euclidean_klein_at_origin() {
        let pair = ProjectivePair::new(FinslerMetric::euclidean(2), FinslerMetric::klein(2)).unwrap();
        let p = tp(&[0.0, 0.0], &[0.0, 1.0]);
        let h = build_h(&pair, &p).unwrap().h;
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!((h - want).abs().max() < 1e-15);
        assert!((mu(&pair, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((first_integrals(&pair, &p).unwrap().alpha(1) - 1.0).abs() < 1e-15);
        let k = sarlet_k(&pair, &p).unwrap();
        assert!((k - DMatrix::identity(2, 2)).abs().max() < 1e-15);
    }

    #[test]
    fn two_dimensional_worked_example() {
        // f_1 = F³/F̃³ · det g̃ / det g, cross-checked against the charpoly
        let pair = ProjectivePair::new(FinslerMetric::euclidean(2), FinslerMetric::klein(2)).unwrap();
        let p = tp(&[0.1, 0.2], &[1.0, 0.0]);
        let pp = PairPoint::new(&pair, &p).unwrap();
        let fi = pp.first_integrals().unwrap();
        assert!(relative_gap(fi.alpha(1), pp.f1_closed_form()) < 1e-12);
        assert_eq!(fi.alpha(2), 1.0);
        let checks = pp.cross_checks(&fi).unwrap();
        assert!(checks.i0_rel < 1e-12 && checks.i1_rel < 1e-12);
    }

    #[test]
    fn sign_mismatch_reported() {
        let pair = ProjectivePair::new(FinslerMetric::euclidean(2), FinslerMetric::klein(2)).unwrap();
        let mut pp = PairPoint::new(&pair, &tp(&[0.0, 0.0], &[1.0, 0.0])).unwrap();
        pp.jet_tilde.det_g = -1.0;
        assert!(matches!(pp.mu(), Err(Error::SignMismatch { .. })));
        assert!(matches!(pp.sarlet_k(), Err(Error::SignMismatch { .. })));
    }
}
