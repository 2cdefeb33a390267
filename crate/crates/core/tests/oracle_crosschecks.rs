//! Primary computations against the independent oracles.

mod common;

use nalgebra::DMatrix;

use common::*;
use finsler_core::diffkit::{evaluate, mixed_xy_hessian, y_jet2, Derivative, EvalRequest, Squared};
use finsler_core::dynamics::spray_coefficients;
use finsler_core::integrals::{charpoly_coefficients, PairPoint};
use finsler_core::metrics::{metric_jet, MatrixField};
use finsler_core::oracle::{
    charpoly_by_interpolation, christoffel_oracle, delta_alpha_combinatorial, fd_derivative, fd_jet,
};
use finsler_core::{catalog_metric, FinslerMetric, MetricDescriptor, ProjectivePair, TangentPoint};

const FD_STEP: f64 = 1e-5;

/// `‖a - b‖_max / ‖b‖_max`
fn mat_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}

#[test]
fn y_hessian_matches_finite_differences_on_catalog() {
    for n in [2, 3] {
        for metric in catalog(n) {
            let mut worst = 0.0f64;
            for p in sample_metric(&metric, n, 100, 11) {
                let (_, _, hess) = y_jet2(&metric, p.x.as_slice(), p.y.as_slice()).unwrap();
                let fd = fd_derivative(&metric, p.x.as_slice(), p.y.as_slice(), Derivative::YHessian, FD_STEP)
                    .unwrap()
                    .into_matrix()
                    .unwrap();
                worst = worst.max(mat_gap(&hess, &fd));
            }
            assert!(worst <= 1e-6, "{} n={n}: {worst:e}", metric.name());
        }
    }
}

#[test]
fn funk_jets_match_finite_differences() {
    let funk = FinslerMetric::funk(2);
    let ad = evaluate(&funk, &[0.1, 0.0], &[1.0, 0.0], EvalRequest::ALL).unwrap();
    let fd = fd_jet(&funk, &[0.1, 0.0], &[1.0, 0.0], FD_STEP).unwrap();
    assert!(rel_gap(ad.value, fd.value) < 1e-14);
    assert!(rel_gap_vec(ad.y_gradient.unwrap().as_slice(), fd.y_gradient.unwrap().as_slice()) < 1e-6);
    assert!(mat_gap(&ad.y_hessian.unwrap(), &fd.y_hessian.unwrap()) < 1e-6);

    let mixed = mixed_xy_hessian(&funk, &[0.2, 0.1], &[1.0, 1.0]).unwrap();
    let fd = fd_derivative(&funk, &[0.2, 0.1], &[1.0, 1.0], Derivative::MixedYX, FD_STEP)
        .unwrap()
        .into_matrix()
        .unwrap();
    assert!(mat_gap(&mixed, &fd) < 1e-6);

    let ad = y_jet2(&funk, &[0.1, 0.1], &[1.0, 0.0]).unwrap().2;
    let fd = fd_derivative(&funk, &[0.1, 0.1], &[1.0, 0.0], Derivative::YHessian, FD_STEP)
        .unwrap()
        .into_matrix()
        .unwrap();
    assert!(mat_gap(&ad, &fd) < 1e-6);
}

#[test]
fn klein_metric_tensor_from_finite_differences() {
    let klein = FinslerMetric::klein(2);
    let p = TangentPoint::new(vec![0.3, 0.0], vec![0.0, 1.0]).unwrap();
    let jet = metric_jet(&klein, &p).unwrap();
    let fd = fd_derivative(&Squared(&klein), &[0.3, 0.0], &[0.0, 1.0], Derivative::YHessian, FD_STEP)
        .unwrap()
        .into_matrix()
        .unwrap()
        * 0.5;
    assert!((&jet.g - &fd).amax() < 1e-6);
    // Klein F² is quadratic in y: g = ((1 - r²) I + x xᵀ) / (1 - r²)²
    let r2: f64 = 0.09;
    assert!((jet.g[(0, 0)] - 1.0 / (1.0 - r2).powi(2)).abs() < 1e-12);
    assert!((jet.g[(1, 1)] - 1.0 / (1.0 - r2)).abs() < 1e-12);
}

#[test]
fn warped_x_gradient() {
    let m = warped(2);
    let fd = fd_derivative(&m, &[1.0, 0.0], &[0.0, 1.0], Derivative::XGradient, FD_STEP)
        .unwrap()
        .into_vector()
        .unwrap();
    let ad = finsler_core::diffkit::x_gradient(&m, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
    assert!((ad[0] - 0.5f64.sqrt()).abs() < 1e-14);
    assert!((fd[0] - 0.5f64.sqrt()).abs() < 1e-9);
    assert!(ad[1].abs() < 1e-15);
}

#[test]
fn warped_spray_matches_christoffels() {
    let field = MatrixField::Warped;
    for n in [2, 3] {
        let m = warped(n);
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        let y = vec![1.0; n];
        let spray = spray_coefficients(&m, &TangentPoint::new(x.clone(), y.clone()).unwrap()).unwrap();
        let gamma = christoffel_oracle(|x| field.eval_matrix(x), &x, FD_STEP).unwrap();
        let want = gamma.half_contract(&y);
        assert!(rel_gap_vec(spray.g.as_slice(), want.as_slice()) < 1e-6, "n={n}");
    }
    for p in sample_metric(&warped(3), 3, 100, 12) {
        let spray = spray_coefficients(&warped(3), &p).unwrap();
        let gamma = christoffel_oracle(|x| field.eval_matrix(x), p.x.as_slice(), FD_STEP).unwrap();
        let want = gamma.half_contract(p.y.as_slice());
        assert!((spray.g - want).amax() <= 1e-6 * p.y.norm_squared());
    }
}

#[test]
fn constant_riemannian_spray_vanishes_like_christoffels() {
    let field = MatrixField::Constant {
        matrix: vec![vec![2.0, 0.3], vec![0.3, 1.5]],
    };
    let m = catalog_metric(&MetricDescriptor::Riemannian { field: field.clone() }, 2).unwrap();
    let p = TangentPoint::new(vec![0.4, -1.0], vec![1.0, 2.0]).unwrap();
    let gamma = christoffel_oracle(|x| field.eval_matrix(x), &[0.4, -1.0], FD_STEP).unwrap();
    assert_eq!(gamma.half_contract(&[1.0, 2.0]).amax(), 0.0);
    assert!(spray_coefficients(&m, &p).unwrap().g.amax() < 1e-14);
}

#[test]
fn interpolated_charpoly_of_h_matches() {
    for n in [2, 3, 4] {
        for (label, pair) in equivalent_pairs(n) {
            for p in sample(&pair, 100, 13) {
                let h = PairPoint::new(&pair, &p).unwrap().h_tensor().h;
                let fl = charpoly_coefficients(&h).unwrap();
                let interp = charpoly_by_interpolation(&h, None).unwrap();
                assert!(rel_gap_vec(&interp, &fl) <= 1e-9, "{label} n={n}");
            }
        }
    }
}

#[test]
fn random_four_by_four_charpoly() {
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.3, -0.7, 0.1, 0.9, -0.2, 0.5, 0.8, -1.0, 0.6, 0.0, -0.4, 0.2, 1.0, -0.9, 0.3, 0.7,
        ],
    );
    let fl = charpoly_coefficients(&m).unwrap();
    let interp = charpoly_by_interpolation(&m, None).unwrap();
    assert!(rel_gap_vec(&interp, &fl) <= 1e-9);
}

#[test]
fn planar_example_against_oracles() {
    let pair = ProjectivePair::new(FinslerMetric::euclidean(2), FinslerMetric::klein(2)).unwrap();
    let p = TangentPoint::new(vec![0.1, 0.2], vec![1.0, 0.0]).unwrap();
    let pp = PairPoint::new(&pair, &p).unwrap();
    let f = pp.first_integrals().unwrap();
    let interp = charpoly_by_interpolation(&pp.h_tensor().h, None).unwrap();
    assert!(rel_gap(f.alpha(1), interp[1]) < 1e-12);
    assert!(rel_gap(f.alpha(1), pp.f1_closed_form()) < 1e-12);
    let d1 = delta_alpha_combinatorial(&pair, &p, 1).unwrap();
    let want = (pp.jet.f / pp.jet_tilde.f).powi(3) * pp.jet_tilde.det_g;
    assert!(rel_gap(d1, want) < 1e-8);
    // f₁ in closed form: x = (0.1, 0.2), y = e₁, F = 1, r² = 0.05, ⟨x,y⟩ = 0.1
    let r2: f64 = 0.05;
    let ft = ((1.0 - r2) + 0.01f64).sqrt() / (1.0 - r2);
    let det_gt = 1.0 / (1.0 - r2).powi(3);
    assert!(rel_gap(f.alpha(1), det_gt / ft.powi(3)) < 1e-12);
}

#[test]
fn combinatorial_delta_matches_all_alpha() {
    for n in [2, 3] {
        let mut pairs = equivalent_pairs(n);
        pairs.push(("euclidean/warped", negative_pair(n)));
        for (label, pair) in pairs {
            for p in sample(&pair, 100, 14) {
                let f = PairPoint::new(&pair, &p).unwrap().first_integrals().unwrap();
                for alpha in 1..=n {
                    let d = delta_alpha_combinatorial(&pair, &p, alpha).unwrap();
                    assert!(rel_gap(d, f.delta[alpha - 1]) <= 1e-8, "{label} n={n} alpha={alpha}");
                }
            }
        }
    }
}

/// Conjugating by a coordinate permutation leaves every `f_α` unchanged.
#[test]
fn first_integrals_invariant_under_relabelling() {
    let pair = ProjectivePair::new(FinslerMetric::euclidean(3), FinslerMetric::funk(3)).unwrap();
    let perm = [2usize, 0, 1];
    for p in sample(&pair, 30, 15) {
        let q = TangentPoint::new(
            perm.iter().map(|&i| p.x[i]).collect(),
            perm.iter().map(|&i| p.y[i]).collect(),
        )
        .unwrap();
        for alpha in 1..=3 {
            let a = delta_alpha_combinatorial(&pair, &p, alpha).unwrap();
            let b = delta_alpha_combinatorial(&pair, &q, alpha).unwrap();
            let det_a = metric_jet(&pair.base, &p).unwrap().det_g;
            let det_b = metric_jet(&pair.base, &q).unwrap().det_g;
            assert!(rel_gap(a / det_a, b / det_b) < 1e-10);
        }
    }
}

#[test]
fn planar_angular_metrics_are_proportional() {
    for (label, pair) in equivalent_pairs(2) {
        for p in sample(&pair, 100, 16) {
            let pp = PairPoint::new(&pair, &p).unwrap();
            let f1 = pp.first_integrals().unwrap().alpha(1);
            let lhs = &pp.jet_tilde.h / pp.jet_tilde.f;
            let rhs = &pp.jet.h / pp.jet.f;
            assert!((&lhs - &rhs * f1).norm() <= 1e-9 * rhs.norm(), "{label}");
        }
    }
}

#[test]
fn oracle_scope_reported() {
    let pair = ProjectivePair::new(FinslerMetric::euclidean(4), FinslerMetric::klein(4)).unwrap();
    let p = TangentPoint::new(vec![0.0; 4], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(delta_alpha_combinatorial(&pair, &p, 2).is_err());
    let h = PairPoint::new(&pair, &p).unwrap().h_tensor().h;
    assert!(charpoly_by_interpolation(&h, None).is_ok());
}
