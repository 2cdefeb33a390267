#![allow(dead_code)]

use finsler_core::metrics::{MatrixField, OneForm};
use finsler_core::sampling::{Sampler, SamplingConfig};
use finsler_core::{catalog_metric, FinslerMetric, MetricDescriptor, ProjectivePair, TangentPoint};

pub fn warped(n: usize) -> FinslerMetric {
    catalog_metric(&MetricDescriptor::Riemannian { field: MatrixField::Warped }, n).unwrap()
}

/// `α + df` with `α` Euclidean and `f = 0.1 x¹`.
pub fn randers_exact(n: usize) -> FinslerMetric {
    let mut coeffs = vec![0.0; n];
    coeffs[0] = 0.1;
    catalog_metric(
        &MetricDescriptor::Randers {
            alpha: MatrixField::Identity,
            beta: OneForm::ExactLinear { coeffs },
        },
        n,
    )
    .unwrap()
}

/// Randers metric whose one-form `x² dx¹` is not closed.
pub fn randers_shear(n: usize) -> FinslerMetric {
    catalog_metric(
        &MetricDescriptor::Randers {
            alpha: MatrixField::Identity,
            beta: OneForm::Shear { strength: 0.5 },
        },
        n,
    )
    .unwrap()
}

/// Pairs whose members share their geodesics.
pub fn equivalent_pairs(n: usize) -> Vec<(&'static str, ProjectivePair)> {
    let e = FinslerMetric::euclidean(n);
    let k = FinslerMetric::klein(n);
    let f = FinslerMetric::funk(n);
    vec![
        ("euclidean/klein", ProjectivePair::new(e.clone(), k.clone()).unwrap()),
        ("euclidean/funk", ProjectivePair::new(e.clone(), f.clone()).unwrap()),
        ("klein/funk", ProjectivePair::new(k, f).unwrap()),
        ("euclidean/randers", ProjectivePair::new(e, randers_exact(n)).unwrap()),
    ]
}

pub fn negative_pair(n: usize) -> ProjectivePair {
    ProjectivePair::new(FinslerMetric::euclidean(n), warped(n)).unwrap()
}

pub fn catalog(n: usize) -> Vec<FinslerMetric> {
    vec![
        FinslerMetric::euclidean(n),
        FinslerMetric::klein(n),
        FinslerMetric::funk(n),
        randers_exact(n),
        warped(n),
    ]
}

pub fn sample(pair: &ProjectivePair, count: usize, seed: u64) -> Vec<TangentPoint> {
    let mut s = Sampler::new(pair.dimension(), seed, SamplingConfig::default()).unwrap();
    s.tangent_points(count, |x| pair.in_domain(x)).unwrap()
}

pub fn sample_metric(metric: &FinslerMetric, n: usize, count: usize, seed: u64) -> Vec<TangentPoint> {
    let mut s = Sampler::new(n, seed, SamplingConfig::default()).unwrap();
    s.tangent_points(count, |x| metric.in_domain(x)).unwrap()
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `‖a - b‖_∞ / ‖b‖_∞`
pub fn rel_gap_vec(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
