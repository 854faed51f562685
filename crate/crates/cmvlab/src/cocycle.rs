//! The 2×2 cocycle layer: Szegő steps, Gesztesy–Zinchenko steps, scaled
//! transfer products, the conjugation into SL(2,ℝ) and the M₀ factorization.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    mat2_adjoint, mat2_det, mat2_frobenius_dist, mat2_identity, mat2_max_abs, mat2_mul,
    mat2_op_norm, mat2_scale, Mat2,
};
use crate::model::{checked_alpha, rho_of, SamplingFunction};
use crate::torus::{check_dims, Frequency, Phase};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// z = e^{iθ} on the unit circle together with the fixed branch √z = e^{iθ/2},
/// θ ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    theta: f64,
    z: Complex64,
    sqrt_z: Complex64,
}

impl SpectralPoint {
    pub fn new(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        SpectralPoint {
            theta: t,
            z: Complex64::cis(t),
            sqrt_z: Complex64::cis(0.5 * t),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn sqrt_z(&self) -> Complex64 {
        self.sqrt_z
    }
}

impl Serialize for SpectralPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.theta)
    }
}

impl<'de> Deserialize<'de> for SpectralPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(SpectralPoint::new)
    }
}

/// A 2×2 matrix stored as e^{log_scale}·mat with the largest entry of
/// `mat` kept in [1/2, 2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMat2 {
    mat: Mat2,
    log_scale: f64,
}

impl ScaledMat2 {
    pub fn identity() -> Self {
        ScaledMat2 {
            mat: mat2_identity(),
            log_scale: 0.0,
        }
    }

    pub fn from_mat(mat: Mat2) -> Self {
        let mut s = ScaledMat2 {
            mat,
            log_scale: 0.0,
        };
        s.renormalize();
        s
    }

    pub fn mat(&self) -> &Mat2 {
        &self.mat
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// log of the operator norm of the represented matrix.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + mat2_op_norm(&self.mat).ln()
    }

    /// The represented matrix in plain form; overflows for huge products.
    pub fn represented(&self) -> Mat2 {
        mat2_scale(&self.mat, self.log_scale.exp())
    }

    /// det of the represented matrix, divided out of the scale: for a
    /// unimodular product this is 1.
    pub fn det_represented(&self) -> Complex64 {
        mat2_det(&self.mat) * (2.0 * self.log_scale).exp()
    }

    /// self · rhs
    pub fn mul(&self, rhs: &ScaledMat2) -> ScaledMat2 {
        let mut s = ScaledMat2 {
            mat: mat2_mul(&self.mat, &rhs.mat),
            log_scale: self.log_scale + rhs.log_scale,
        };
        s.renormalize();
        s
    }

    /// self ← step · self
    pub fn left_apply(&mut self, step: &Mat2) {
        self.mat = mat2_mul(step, &self.mat);
        self.renormalize();
    }

    fn renormalize(&mut self) {
        let m = mat2_max_abs(&self.mat);
        if m == 0.0 || !m.is_finite() {
            return;
        }
        if !(0.5..=2.0).contains(&m) {
            let e = m.log2().round();
            self.mat = mat2_scale(&self.mat, (-e).exp2());
            self.log_scale += e * LN_2;
        }
    }
}

/// (1/ρ)[[√z, −ᾱ/√z], [−α√z, 1/√z]]
pub fn szego_matrix(alpha: Complex64, z: &SpectralPoint) -> Result<Mat2> {
    let a = checked_alpha(alpha)?;
    let r = 1.0 / rho_of(a);
    let s = z.sqrt_z;
    let si = s.conj();
    Ok([[s * r, -a.conj() * si * r], [-a * s * r, si * r]])
}

pub fn szego_step(alpha: Complex64, z: &SpectralPoint) -> Result<ScaledMat2> {
    szego_matrix(alpha, z).map(ScaledMat2::from_mat)
}

/// Even-index Gesztesy–Zinchenko matrix (1/ρ)[[−α, 1], [1, −ᾱ]].
pub fn gz_even_matrix(alpha: Complex64) -> Result<Mat2> {
    let a = checked_alpha(alpha)?;
    let r = 1.0 / rho_of(a);
    Ok([[-a * r, ONE * r], [ONE * r, -a.conj() * r]])
}

/// Odd-index Gesztesy–Zinchenko matrix (1/ρ)[[−ᾱ, z], [z⁻¹, −α]].
pub fn gz_odd_matrix(alpha: Complex64, z: &SpectralPoint) -> Result<Mat2> {
    let a = checked_alpha(alpha)?;
    let r = 1.0 / rho_of(a);
    Ok([[-a.conj() * r, z.z * r], [z.z.conj() * r, -a * r]])
}

/// One GZ step: the odd matrix applied after the even one.
pub fn gz_matrix(alpha_even: Complex64, alpha_odd: Complex64, z: &SpectralPoint) -> Result<Mat2> {
    Ok(mat2_mul(&gz_odd_matrix(alpha_odd, z)?, &gz_even_matrix(alpha_even)?))
}

pub fn gz_step(alpha_even: Complex64, alpha_odd: Complex64, z: &SpectralPoint) -> Result<ScaledMat2> {
    gz_matrix(alpha_even, alpha_odd, z).map(ScaledMat2::from_mat)
}

/// The unitary Q = −(1/(1+i))[[1, −i], [1, i]] conjugating SU(1,1) into
/// SL(2,ℝ).
pub fn su11_conjugator() -> Mat2 {
    let f = -ONE / Complex64::new(1.0, 1.0);
    let i = Complex64::i();
    [[f, -i * f], [f, i * f]]
}

/// T = Q*·m·Q, which is real for matrices of Szegő type.
pub fn sl2r_conjugate(m: &ScaledMat2) -> Result<ScaledMat2> {
    let q = su11_conjugator();
    let t = mat2_mul(&mat2_adjoint(&q), &mat2_mul(&m.mat, &q));
    let scale = mat2_max_abs(&t);
    let residue = t
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.im.abs()))
        / scale;
    if residue > 1e-10 {
        return Err(Error::Conjugation { residue });
    }
    let mut out = ScaledMat2 {
        mat: t,
        log_scale: m.log_scale,
    };
    out.renormalize();
    Ok(out)
}

/// Largest imaginary part of a matrix relative to its largest entry.
pub fn imaginary_residue(m: &ScaledMat2) -> f64 {
    let scale = mat2_max_abs(&m.mat);
    m.mat
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.im.abs()))
        / scale
}

/// diag(√z, 1/√z), the factor relating a GZ step with vanishing even
/// coefficient to a Szegő step.
pub fn m0_matrix(z: &SpectralPoint) -> Mat2 {
    [[z.sqrt_z, ZERO], [ZERO, z.sqrt_z.conj()]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct M0Check {
    /// Frobenius distance between the GZ step and M₀ times the Szegő step
    pub residual: f64,
    pub m0_norm: f64,
}

/// Compares gz_step(0, α, z) with M₀·szego_step(α, z).
pub fn m0_factorization_check(alpha_odd: Complex64, z: &SpectralPoint) -> Result<M0Check> {
    let g = gz_matrix(ZERO, alpha_odd, z)?;
    let m0 = m0_matrix(z);
    let rhs = mat2_mul(&m0, &szego_matrix(alpha_odd, z)?);
    Ok(M0Check {
        residual: mat2_frobenius_dist(&g, &rhs),
        m0_norm: mat2_op_norm(&m0),
    })
}

/// Which single-step matrix a transfer product is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleKind {
    Szego,
    /// n GZ steps, consuming the coefficients at x + 2jω (even) and
    /// x + (2j+1)ω (odd)
    Gz,
    /// the Szegő product conjugated into SL(2,ℝ)
    Sl2r,
}

/// Ordered product Π_{j=n−1}^{0} M(α_j) of Szegő steps.
pub fn szego_product(alphas: &[Complex64], z: &SpectralPoint) -> Result<ScaledMat2> {
    let mut acc = ScaledMat2::identity();
    for &a in alphas {
        acc.left_apply(&szego_matrix(a, z)?);
    }
    Ok(acc)
}

/// Product of GZ steps over consecutive (even, odd) coefficient pairs.
pub fn gz_product(alphas: &[Complex64], z: &SpectralPoint) -> Result<ScaledMat2> {
    if alphas.len() % 2 != 0 {
        return Err(Error::InvalidArgument(
            "GZ products need an even number of coefficients".into(),
        ));
    }
    let mut acc = ScaledMat2::identity();
    for pair in alphas.chunks_exact(2) {
        acc.left_apply(&gz_matrix(pair[0], pair[1], z)?);
    }
    Ok(acc)
}

/// The n-step transfer matrix at phase x0.
pub fn transfer_product(
    kind: CocycleKind,
    alpha: &SamplingFunction,
    x0: &Phase,
    omega: &Frequency,
    z: &SpectralPoint,
    n: usize,
) -> Result<ScaledMat2> {
    check_dims(x0, omega)?;
    match kind {
        CocycleKind::Szego => {
            let mut acc = ScaledMat2::identity();
            for j in 0..n {
                let a = alpha.eval(&x0.shifted(omega, j as i64));
                acc.left_apply(&szego_matrix(a, z)?);
            }
            Ok(acc)
        }
        CocycleKind::Gz => {
            let mut acc = ScaledMat2::identity();
            for j in 0..n {
                let ae = alpha.eval(&x0.shifted(omega, 2 * j as i64));
                let ao = alpha.eval(&x0.shifted(omega, 2 * j as i64 + 1));
                acc.left_apply(&gz_matrix(ae, ao, z)?);
            }
            Ok(acc)
        }
        CocycleKind::Sl2r => {
            let m = transfer_product(CocycleKind::Szego, alpha, x0, omega, z, n)?;
            sl2r_conjugate(&m)
        }
    }
}

/// log‖M_n(x0)‖ for the Szegő cocycle, the quantity every Lyapunov
/// estimate averages.
pub fn szego_log_norm(
    alpha: &SamplingFunction,
    x0: &Phase,
    omega: &Frequency,
    z: &SpectralPoint,
    n: usize,
) -> Result<f64> {
    let mut acc = ScaledMat2::identity();
    for j in 0..n {
        let a = alpha.eval(&x0.shifted(omega, j as i64));
        acc.left_apply(&szego_matrix(a, z)?);
    }
    Ok(acc.log_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        mat2_frobenius_dist(a, b) < tol
    }

    #[test]
    fn zero_coefficient_at_one_is_identity() {
        let m = szego_step(ZERO, &SpectralPoint::new(0.0)).unwrap();
        assert!(close(&m.represented(), &mat2_identity(), 1e-15));
    }

    #[test]
    fn zero_coefficient_is_diagonal_unitary() {
        let z = SpectralPoint::new(1.3);
        let m = szego_step(ZERO, &z).unwrap();
        let d = [[Complex64::cis(0.65), ZERO], [ZERO, Complex64::cis(-0.65)]];
        assert!(close(&m.represented(), &d, 1e-15));
        assert!(m.log_norm().abs() < 1e-15);
    }

    #[test]
    fn half_coefficient_at_one() {
        let m = szego_step(c(0.5, 0.0), &SpectralPoint::new(0.0)).unwrap();
        let f = 2.0 / 3f64.sqrt();
        let expected = [[c(f, 0.0), c(-0.5 * f, 0.0)], [c(-0.5 * f, 0.0), c(f, 0.0)]];
        assert!(close(&m.represented(), &expected, 1e-15));
        // symmetric, so the norm is the top eigenvalue √3
        assert!((m.log_norm() - 0.5 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn gz_examples() {
        let one = SpectralPoint::new(0.0);
        assert!(close(&gz_step(ZERO, ZERO, &one).unwrap().represented(), &mat2_identity(), 1e-15));
        let z = SpectralPoint::new(0.8);
        let d = [[Complex64::cis(0.8), ZERO], [ZERO, Complex64::cis(-0.8)]];
        assert!(close(&gz_step(ZERO, ZERO, &z).unwrap().represented(), &d, 1e-15));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = gz_step(ZERO, c(-s, 0.0), &one).unwrap().represented();
        let r2 = 2f64.sqrt();
        let expected = [[c(r2, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(r2, 0.0)]];
        assert!(close(&g, &expected, 1e-14));
    }

    #[test]
    fn empty_product_is_identity() {
        let a = SamplingFunction::strong_coupling();
        let w = Frequency::default_2d();
        let x = Phase::origin(2);
        for kind in [CocycleKind::Szego, CocycleKind::Gz, CocycleKind::Sl2r] {
            let m = transfer_product(kind, &a, &x, &w, &SpectralPoint::new(1.0), 0).unwrap();
            assert!(close(&m.represented(), &mat2_identity(), 1e-15));
            assert_eq!(m.log_scale(), 0.0);
        }
    }

    #[test]
    fn free_cocycle_stays_unitary_for_long_products() {
        let a = SamplingFunction::zero(1);
        let w = Frequency::with_default_condition(vec![0.3]).unwrap();
        let m = transfer_product(CocycleKind::Szego, &a, &Phase::origin(1), &w, &SpectralPoint::new(2.0), 1000)
            .unwrap();
        assert!(m.log_norm().abs() < 1e-10);
    }

    #[test]
    fn constant_cocycle_power_law() {
        let a = SamplingFunction::constant(1, c(0.5, 0.0)).unwrap();
        let w = Frequency::with_default_condition(vec![0.3]).unwrap();
        let m = transfer_product(CocycleKind::Szego, &a, &Phase::origin(1), &w, &SpectralPoint::new(0.0), 100)
            .unwrap();
        assert!((m.log_norm() / 100.0 - 0.549_306).abs() < 0.01);
    }

    #[test]
    fn huge_products_do_not_overflow() {
        let a = SamplingFunction::constant(1, c(0.9, 0.0)).unwrap();
        let w = Frequency::with_default_condition(vec![0.3]).unwrap();
        let m = transfer_product(CocycleKind::Szego, &a, &Phase::origin(1), &w, &SpectralPoint::new(0.0), 5000)
            .unwrap();
        assert!(m.log_norm().is_finite());
        assert!(m.log_norm() > 700.0);
    }

    #[test]
    fn moderate_products_keep_unit_determinant() {
        let a = SamplingFunction::strong_coupling();
        let w = Frequency::default_2d();
        let m = transfer_product(CocycleKind::Szego, &a, &Phase::origin(2), &w, &SpectralPoint::new(2.8), 20)
            .unwrap();
        assert!((m.det_represented() - ONE).norm() < 1e-10);
    }

    #[test]
    fn conjugation_of_identity_and_free_step() {
        let t = sl2r_conjugate(&ScaledMat2::identity()).unwrap();
        assert!(close(&t.represented(), &mat2_identity(), 1e-15));
        let theta = 1.1;
        let t = sl2r_conjugate(&szego_step(ZERO, &SpectralPoint::new(theta)).unwrap()).unwrap();
        let r = t.represented();
        let (s, co) = (theta / 2.0).sin_cos();
        assert!((r[0][0].re - co).abs() < 1e-15 && (r[1][1].re - co).abs() < 1e-15);
        assert!((r[0][1].re.abs() - s).abs() < 1e-15 && (r[0][1].re + r[1][0].re).abs() < 1e-15);
    }

    #[test]
    fn conjugation_of_half_step_is_symmetric_with_same_spectrum() {
        let m = szego_step(c(0.5, 0.0), &SpectralPoint::new(0.0)).unwrap();
        let t = sl2r_conjugate(&m).unwrap().represented();
        assert!((t[0][1] - t[1][0]).norm() < 1e-15);
        let tr = (t[0][0] + t[1][1]).re;
        assert!((tr - (3f64.sqrt() + 1.0 / 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn conjugation_rejects_non_su11() {
        let m = ScaledMat2::from_mat([[c(0.0, 1.0), ZERO], [ZERO, ONE]]);
        assert!(matches!(sl2r_conjugate(&m), Err(Error::Conjugation { .. })));
    }

    #[test]
    fn m0_examples() {
        let r = m0_factorization_check(ZERO, &SpectralPoint::new(0.0)).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!((r.m0_norm - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = m0_factorization_check(c(-s, 0.0), &SpectralPoint::new(std::f64::consts::FRAC_PI_3)).unwrap();
        assert!(r.residual < 1e-12);
        let r = m0_factorization_check(c(0.3, 0.4), &SpectralPoint::new(2.1)).unwrap();
        assert!(r.residual < 1e-12 && (r.m0_norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coefficient_on_circle_is_a_model_violation() {
        assert!(matches!(szego_step(ONE, &SpectralPoint::new(0.0)), Err(Error::ModelViolation(_))));
    }
}
