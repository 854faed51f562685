mod common;

use cmvlab::cmvop::{det_transfer_check, DetPath};
use cmvlab::cocycle::SpectralPoint;
use cmvlab::linalg::DenseMatrix;
use cmvlab::spectral::eigenpairs;
use cmvlab::{Error, FiniteCMV, Frequency, Phase, SamplingFunction};
use common::{c, circle_point, disk_point, random_truncation, rng, to_nalgebra};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn coeffs_strategy(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..0.95f64, 0.0..std::f64::consts::TAU), 0..max_len)
        .prop_map(|v| v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
}

fn unit_strategy() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(Complex64::cis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_unitary_and_factored(
        a in -6i64..6,
        interior in coeffs_strategy(14),
        beta in unit_strategy(),
        eta in unit_strategy(),
    ) {
        let b = a + interior.len() as i64;
        let op = FiniteCMV::new(a, b, &interior, beta, eta).unwrap();
        let e = op.dense_e();
        prop_assert!(e.unitarity_defect() < 1e-12);
        prop_assert!(e.max_abs_diff(&op.dense_l().mul(&op.dense_m())) < 1e-12);
        prop_assert!(op.dense_l().unitarity_defect() < 1e-12);
        prop_assert!(op.dense_m().unitarity_defect() < 1e-12);
    }

    #[test]
    fn banded_and_dense_determinants_agree(
        a in -6i64..6,
        interior in coeffs_strategy(20),
        beta in unit_strategy(),
        eta in unit_strategy(),
        r in 0.1..3.0f64,
        t in 0.0..std::f64::consts::TAU,
    ) {
        let b = a + interior.len() as i64;
        let op = FiniteCMV::new(a, b, &interior, beta, eta).unwrap();
        let z = Complex64::from_polar(r, t);
        let dense = op.char_det_dense(z).value();
        let banded = op.char_det_banded(z).value();
        prop_assert!((dense - banded).norm() <= 1e-9 * dense.norm().max(1.0));
    }

    #[test]
    fn determinant_vanishes_at_eigenvalues(seed in 0u64..1000) {
        let mut r = rng(seed);
        let op = random_truncation(&mut r, 10);
        let values = common::dense_eigenvalues(&op.dense_e());
        for z in values {
            // |φ(z)| relative to the product of distances to the other eigenvalues
            let phi = op.char_det(z).value.norm();
            prop_assert!(phi < 1e-9 * 2f64.powi(op.dim() as i32));
        }
    }
}

#[test]
fn char_det_against_nalgebra_determinant() {
    let mut r = rng(11);
    for _ in 0..200 {
        let op = random_truncation(&mut r, 12);
        let z = disk_point(&mut r, 2.0);
        let mut shifted = op.dense_e();
        let n = shifted.dim();
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { z } else { c(0.0, 0.0) };
                shifted[(i, j)] = delta - shifted[(i, j)];
            }
        }
        let oracle = to_nalgebra(&shifted).determinant();
        let got = op.char_det(z);
        assert_eq!(got.path, DetPath::Dense);
        assert!(
            (got.value - oracle).norm() <= 1e-8 * oracle.norm().max(1e-300),
            "{} vs {}",
            got.value,
            oracle
        );
    }
}

#[test]
fn long_truncations_switch_to_banded_path() {
    let mut r = rng(3);
    let interior: Vec<Complex64> = (0..199).map(|_| disk_point(&mut r, 0.8)).collect();
    let op = FiniteCMV::new(0, 199, &interior, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    let got = op.char_det(c(0.3, 0.1));
    assert_eq!(got.path, DetPath::Banded);
    assert!(got.log_abs.is_finite());
}

#[test]
fn green_product_formula_matches_inverse() {
    let mut r = rng(21);
    let mut checked = 0;
    while checked < 100 {
        let op = random_truncation(&mut r, 12);
        let phases = common::dense_eigenphases(&op.dense_e());
        let theta = std::f64::consts::TAU * r.random::<f64>();
        let z = Complex64::cis(theta);
        if phases.iter().any(|&t| (Complex64::cis(t) - z).norm() < 1e-3) {
            continue;
        }
        let dense = to_nalgebra(&op.pencil(z).to_dense()).try_inverse().unwrap();
        for j in op.a()..=op.b() {
            for k in j..=op.b() {
                let want = dense[((j - op.a()) as usize, (k - op.a()) as usize)].norm();
                let got = op.green_magnitude_product(j, k, z).unwrap();
                assert!((got - want).abs() <= 1e-7 * want.max(1e-12), "({j},{k}) {got} vs {want}");
            }
        }
        checked += 1;
    }
}

#[test]
fn product_formula_is_restricted_to_the_circle() {
    let op = FiniteCMV::new(0, 3, &[c(0.2, 0.1); 3], c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!(matches!(
        op.green_magnitude_product(0, 2, c(0.7, 0.0)),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn green_column_flags_spectrum() {
    let op = FiniteCMV::new(0, 0, &[], c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    // the 1×1 truncation has the single eigenvalue −β̄η
    let z0 = -c(1.0, 0.0);
    assert!(matches!(op.green_column(0, z0), Err(Error::NearSingular { .. })));
}

#[test]
fn relation_holds_on_random_models() {
    let mut r = rng(5);
    let omega = Frequency::default_2d();
    let mut done = 0;
    while done < 100 {
        let k1 = r.random_range(-2..=2);
        let k2 = r.random_range(-2..=2);
        let alpha = SamplingFunction::harmonic(disk_point(&mut r, 0.9), vec![k1, k2]).unwrap();
        let x = Phase::new(vec![r.random(), r.random()]).unwrap();
        let n = r.random_range(2..=12);
        if alpha.eval(&x.shifted(&omega, -1)).norm() <= 0.1 {
            continue;
        }
        let z = SpectralPoint::new(std::f64::consts::TAU * r.random::<f64>());
        let check = det_transfer_check(&alpha, &x, &omega, &z, n).unwrap();
        assert!(check.relative_residual < 1e-8, "n = {n}: {}", check.relative_residual);
        done += 1;
    }
}

#[test]
fn relation_refuses_vanishing_coefficient() {
    let alpha = SamplingFunction::zero(2);
    let err = det_transfer_check(
        &alpha,
        &Phase::origin(2),
        &Frequency::default_2d(),
        &SpectralPoint::new(0.4),
        5,
    )
    .unwrap_err();
    assert!(matches!(err, Error::DegenerateInput(_)));
}

#[test]
fn poisson_reconstructs_eigenvectors() {
    let mut r = rng(8);
    let interior: Vec<Complex64> = (0..40).map(|_| disk_point(&mut r, 0.9)).collect();
    let big = FiniteCMV::new(-20, 20, &interior, circle_point(&mut r), circle_point(&mut r)).unwrap();
    // the restriction keeps the coefficients of [−8, 7] and swaps in new phases
    let inner: Vec<Complex64> = (-8..8).map(|k| big.coefficient(k)).collect();
    let small = FiniteCMV::new(-8, 8, &inner, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    let pairs = eigenpairs(&big).unwrap();
    let mut worst = 0.0_f64;
    for pair in pairs.iter().step_by(2).take(20) {
        let res = small.poisson_residual(&pair.vector, pair.first_site, pair.z(), 0).unwrap();
        worst = worst.max(res);
    }
    assert!(worst < 1e-7, "worst Poisson residual {worst}");
}

#[test]
fn dense_matrices_have_pentadiagonal_shape() {
    let mut r = rng(13);
    let op = random_truncation(&mut r, 12);
    let e: DenseMatrix = op.dense_e();
    for i in 0..e.dim() {
        for j in 0..e.dim() {
            if (i as i64 - j as i64).abs() > 2 {
                assert_eq!(e[(i, j)], c(0.0, 0.0));
            }
        }
    }
}
