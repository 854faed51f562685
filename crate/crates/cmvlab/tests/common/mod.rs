#![allow(dead_code)]

use cmvlab::linalg::DenseMatrix;
use cmvlab::FiniteCMV;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of the open disk with modulus at most `r`.
pub fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>())
}

pub fn circle_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::cis(std::f64::consts::TAU * rng.random::<f64>())
}

/// A truncation with random interval, coefficients and boundary phases.
pub fn random_truncation(rng: &mut ChaCha8Rng, max_dim: usize) -> FiniteCMV {
    let dim = rng.random_range(1..=max_dim) as i64;
    let a = rng.random_range(-5..=5);
    let b = a + dim - 1;
    let interior: Vec<Complex64> = (0..dim - 1).map(|_| disk_point(rng, 0.95)).collect();
    let beta = circle_point(rng);
    let eta = circle_point(rng);
    FiniteCMV::new(a, b, &interior, beta, eta).unwrap()
}

pub fn to_nalgebra(m: &DenseMatrix) -> DMatrix<Complex64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

/// Eigenvalues from a complex Schur decomposition.
pub fn dense_eigenvalues(m: &DenseMatrix) -> Vec<Complex64> {
    let s = nalgebra::Schur::new(to_nalgebra(m));
    s.eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
}

pub fn dense_eigenphases(m: &DenseMatrix) -> Vec<f64> {
    let mut t: Vec<f64> = dense_eigenvalues(m)
        .iter()
        .map(|z| z.arg().rem_euclid(std::f64::consts::TAU))
        .collect();
    t.sort_by(f64::total_cmp);
    t
}

/// Largest chordal distance between two sorted phase multisets, matched
/// greedily around the circle.
pub fn phase_multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, (Complex64::cis(x) - Complex64::cis(y)).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
