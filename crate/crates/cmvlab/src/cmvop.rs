//! Finite-volume extended CMV matrices E^{β,η}_{[a,b]} with their L·M
//! factorization, characteristic determinants, Green's functions and
//! Poisson's formula.
//!
//! Index convention: the block Θ_k = [[ᾱ_k, ρ_k], [ρ_k, −α_k]] occupies
//! rows and columns (k, k+1), inside L for even k and inside M for odd k.
//! Restricting to [a, b] cuts the blocks Θ_{a−1} and Θ_b in half; their
//! coefficients are replaced by unimodular β and η, so the cut pieces are
//! the 1×1 unitaries −β and η̄ and the truncation stays unitary.

use num_complex::Complex64;
use serde::Serialize;

use crate::cocycle::{szego_product, SpectralPoint};
use crate::error::{Error, Result};
use crate::linalg::{mat2_frobenius_dist, BandMatrix, DenseMatrix, Mat2, ScaledComplex};
use crate::model::{rho_of, verblunsky_sequence, SamplingFunction};
use crate::torus::{Frequency, Phase};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest dimension for which the dense LU path runs.
pub const DENSE_LIMIT: usize = 64;

/// Column norms of the Green's function above this mean z is closer than
/// 1e−10 to the spectrum (‖G‖ = 1/dist for a unitary truncation).
const NEAR_SINGULAR_NORM: f64 = 1e10;

/// Tolerance on |β| = 1 and |η| = 1.
const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// The 2×2 unitary Θ = [[ᾱ, ρ], [ρ, −α]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaBlock {
    pub alpha: Complex64,
    pub rho: f64,
}

impl ThetaBlock {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if alpha.norm() > 1.0 + BOUNDARY_TOLERANCE {
            return Err(Error::ModelViolation(format!(
                "Θ block needs |α| ≤ 1, got {}",
                alpha.norm()
            )));
        }
        Ok(ThetaBlock {
            alpha,
            rho: rho_of(alpha),
        })
    }

    pub fn matrix(&self) -> Mat2 {
        let r = Complex64::new(self.rho, 0.0);
        [[self.alpha.conj(), r], [r, -self.alpha]]
    }
}

fn is_even(k: i64) -> bool {
    k.rem_euclid(2) == 0
}

/// L and M of the restriction to [lo, hi], built from the coefficients
/// α̃_k for k = lo−1 ..= hi (`coeffs[0]` is α̃_{lo−1}).
fn lm_factors(lo: i64, hi: i64, coeffs: &[Complex64]) -> (BandMatrix, BandMatrix) {
    let n = (hi - lo + 1) as usize;
    debug_assert_eq!(coeffs.len(), n + 1);
    let mut l = BandMatrix::zeros(n, 1, 1);
    let mut m = BandMatrix::zeros(n, 1, 1);
    for (offset, &alpha) in coeffs.iter().enumerate() {
        let k = lo - 1 + offset as i64;
        let theta = ThetaBlock {
            alpha,
            rho: rho_of(alpha),
        }
        .matrix();
        let target = if is_even(k) { &mut l } else { &mut m };
        for (r, row) in theta.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let i = k + r as i64 - lo;
                let j = k + c as i64 - lo;
                if (0..n as i64).contains(&i) && (0..n as i64).contains(&j) && v != ZERO {
                    target.add(i as usize, j as usize, v);
                }
            }
        }
    }
    (l, m)
}

/// det(z − P E P*) for the restriction of the two-sided operator to
/// [lo, hi], using whatever coefficients sit at the cut ends. Banded LU,
/// O(hi − lo).
///
/// This is the general form needed for sub-intervals whose cut
/// coefficients are not unimodular; there L and M are not unitary and
/// the determinant cannot be reduced to the tridiagonal z L* − M.
pub fn restricted_char_det(lo: i64, hi: i64, coeffs: &[Complex64], z: Complex64) -> ScaledComplex {
    if lo > hi {
        return ScaledComplex::one();
    }
    let (l, m) = lm_factors(lo, hi, coeffs);
    let e = l.mul(&m);
    let n = e.dim();
    let mut shifted = BandMatrix::zeros(n, 2, 2);
    for i in 0..n {
        for j in e.row_range(i) {
            shifted.set(i, j, -e.get(i, j));
        }
        shifted.add(i, i, z);
    }
    shifted.lu().det()
}

/// Which algorithm produced a characteristic determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetPath {
    Empty,
    Dense,
    Banded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharDet {
    pub a: i64,
    pub b: i64,
    pub z: Complex64,
    /// φ(z) = det(z − E), possibly overflowing for very long intervals
    pub value: Complex64,
    /// log|φ(z)|, always finite unless φ vanishes exactly
    pub log_abs: f64,
    /// φ(z) / (ρ_a ⋯ ρ_{b−1}) over the interior coefficients
    pub normalized: Complex64,
    pub path: DetPath,
}

/// The boundary-modified truncation E^{β,η}_{[a,b]} = L·M.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCMV {
    a: i64,
    b: i64,
    /// α̃_k for k = a−1 ..= b, with α̃_{a−1} = β and α̃_b = η
    coeffs: Vec<Complex64>,
    l: BandMatrix,
    m: BandMatrix,
    e: BandMatrix,
}

impl FiniteCMV {
    /// `interior` holds α_a, …, α_{b−1} (empty when a = b).
    pub fn new(a: i64, b: i64, interior: &[Complex64], beta: Complex64, eta: Complex64) -> Result<Self> {
        if b < a {
            return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
        }
        if interior.len() as i64 != b - a {
            return Err(Error::InvalidArgument(format!(
                "interval [{a}, {b}] needs {} interior coefficients, got {}",
                b - a,
                interior.len()
            )));
        }
        for (name, v) in [("β", beta), ("η", eta)] {
            if (v.norm() - 1.0).abs() > BOUNDARY_TOLERANCE {
                return Err(Error::Boundary {
                    name,
                    modulus: v.norm(),
                });
            }
        }
        for (i, v) in interior.iter().enumerate() {
            if !(v.norm() < 1.0) {
                return Err(Error::ModelViolation(format!(
                    "interior coefficient α_{} = {v} is not in the open disk",
                    a + i as i64
                )));
            }
        }
        let mut coeffs = Vec::with_capacity(interior.len() + 2);
        coeffs.push(beta);
        coeffs.extend_from_slice(interior);
        coeffs.push(eta);
        let (l, m) = lm_factors(a, b, &coeffs);
        let e = l.mul(&m);
        Ok(FiniteCMV { a, b, coeffs, l, m, e })
    }

    /// E^{β,η}_{[a,b]}(x0) with α_k = α(x0 + kω).
    pub fn from_model(
        alpha: &SamplingFunction,
        x0: &Phase,
        omega: &Frequency,
        a: i64,
        b: i64,
        beta: Complex64,
        eta: Complex64,
    ) -> Result<Self> {
        let interior = if b > a {
            verblunsky_sequence(alpha, x0, omega, a, b - 1)?
        } else {
            Vec::new()
        };
        Self::new(a, b, &interior, beta, eta)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn beta(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn eta(&self) -> Complex64 {
        *self.coeffs.last().expect("nonempty")
    }

    /// α̃_k for a−1 ≤ k ≤ b.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.coeffs[(k - self.a + 1) as usize]
    }

    pub fn rho(&self, k: i64) -> f64 {
        rho_of(self.coefficient(k))
    }

    pub fn l_band(&self) -> &BandMatrix {
        &self.l
    }

    pub fn m_band(&self) -> &BandMatrix {
        &self.m
    }

    pub fn e_band(&self) -> &BandMatrix {
        &self.e
    }

    pub fn dense_e(&self) -> DenseMatrix {
        self.e.to_dense()
    }

    pub fn dense_l(&self) -> DenseMatrix {
        self.l.to_dense()
    }

    pub fn dense_m(&self) -> DenseMatrix {
        self.m.to_dense()
    }

    /// E v
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.e.mul_vec(v)
    }

    /// ‖(z L* − M) v‖, the factored form of ‖E v − z v‖.
    pub fn factored_residual(&self, z: Complex64, v: &[Complex64]) -> f64 {
        let a = self.pencil(z);
        a.mul_vec(v).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// z L* − M, tridiagonal.
    pub fn pencil(&self, z: Complex64) -> BandMatrix {
        self.l.adjoint().combine(z, &self.m, -ONE)
    }

    pub fn char_det_dense(&self, z: Complex64) -> ScaledComplex {
        let mut a = self.dense_e();
        let n = a.dim();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = -a[(i, j)];
            }
            a[(i, i)] += z;
        }
        a.lu().det()
    }

    pub fn char_det_banded(&self, z: Complex64) -> ScaledComplex {
        restricted_char_det(self.a, self.b, &self.coeffs, z)
    }

    /// φ^{β,η}_{[a,b]}(z): dense LU up to dimension 64, banded LU above.
    pub fn char_det(&self, z: Complex64) -> CharDet {
        let (det, path) = if self.dim() <= DENSE_LIMIT {
            (self.char_det_dense(z), DetPath::Dense)
        } else {
            (self.char_det_banded(z), DetPath::Banded)
        };
        let log_rho: f64 = (self.a..self.b).map(|k| self.rho(k).ln()).sum();
        let normalized = ScaledComplex {
            mantissa: det.mantissa,
            log_scale: det.log_scale - log_rho,
        };
        CharDet {
            a: self.a,
            b: self.b,
            z,
            value: det.value(),
            log_abs: det.ln_abs(),
            normalized: normalized.value(),
            path,
        }
    }

    /// det(z − P E P*) over a sub-interval [lo, hi] ⊂ [a, b], keeping the
    /// stored coefficients at the cut ends (β or η only where the cut
    /// coincides with an end of [a, b]). Returns 1 when lo > hi.
    pub fn sub_char_det(&self, lo: i64, hi: i64, z: Complex64) -> ScaledComplex {
        if lo > hi {
            return ScaledComplex::one();
        }
        assert!(lo >= self.a && hi <= self.b, "sub-interval outside the truncation");
        let from = (lo - 1 - self.a + 1) as usize;
        let to = (hi - self.a + 1) as usize;
        restricted_char_det(lo, hi, &self.coeffs[from..=to], z)
    }

    /// Column k of G = (z L* − M)^{−1}, indexed from a.
    pub fn green_column(&self, k: i64, z: Complex64) -> Result<Vec<Complex64>> {
        let lu = self.pencil(z).lu();
        self.solve_column(&lu, k)
    }

    fn solve_column(&self, lu: &crate::linalg::BandLu, k: i64) -> Result<Vec<Complex64>> {
        if k < self.a || k > self.b {
            return Err(Error::InvalidArgument(format!(
                "index {k} outside [{}, {}]",
                self.a, self.b
            )));
        }
        let mut col = vec![ZERO; self.dim()];
        col[(k - self.a) as usize] = ONE;
        lu.solve_in_place(&mut col);
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > NEAR_SINGULAR_NORM {
            return Err(Error::NearSingular {
                bound: 1.0 / norm,
            });
        }
        Ok(col)
    }

    /// The full Green's matrix, column by column; `g[k][j]` is G(a+j, a+k).
    pub fn green_matrix(&self, z: Complex64) -> Result<Vec<Vec<Complex64>>> {
        let lu = self.pencil(z).lu();
        (self.a..=self.b).map(|k| self.solve_column(&lu, k)).collect()
    }

    /// |G(j,k)| from the determinant product formula, for j ≤ k:
    /// ρ_j⋯ρ_{k−1} |φ_{[a,j−1]} φ_{[k+1,b]} / φ_{[a,b]}|.
    ///
    /// The identity holds for z on the unit circle only; off the circle the
    /// entries pick up powers of |z| that the formula does not carry.
    pub fn green_magnitude_product(&self, j: i64, k: i64, z: Complex64) -> Result<f64> {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "the product formula needs |z| = 1, got |z| = {}",
                z.norm()
            )));
        }
        if !(self.a <= j && j <= k && k <= self.b) {
            return Err(Error::InvalidArgument(format!(
                "need a ≤ j ≤ k ≤ b, got j = {j}, k = {k} on [{}, {}]",
                self.a, self.b
            )));
        }
        let whole = self.sub_char_det(self.a, self.b, z);
        if whole.is_zero() {
            return Err(Error::NearSingular { bound: 0.0 });
        }
        let left = self.sub_char_det(self.a, j - 1, z);
        let right = self.sub_char_det(k + 1, self.b, z);
        let log_rho: f64 = (j..k).map(|i| self.rho(i).ln()).sum();
        Ok((log_rho + left.ln_abs() + right.ln_abs() - whole.ln_abs()).exp())
    }

    /// Both evaluations of G(j,k;z).
    pub fn green_entry(&self, j: i64, k: i64, z: Complex64) -> Result<GreenEntry> {
        let magnitude_product_formula = self.green_magnitude_product(j, k, z)?;
        let col = self.green_column(k, z)?;
        Ok(GreenEntry {
            j,
            k,
            magnitude_product_formula,
            value_dense: col[(j - self.a) as usize],
        })
    }

    /// |u(m) − G(m,a)·r_a − G(m,b)·r_b| where r_a, r_b are the boundary
    /// terms of Poisson's formula.
    ///
    /// `u` is a solution of Ẽu = zu given on a window starting at site
    /// `u_start` that contains [a, b].
    pub fn poisson_residual(&self, u: &[Complex64], u_start: i64, z: Complex64, m: i64) -> Result<f64> {
        let (a, b) = (self.a, self.b);
        if !(a < m && m < b) {
            return Err(Error::InvalidArgument(format!("need a < m < b, got m = {m} on [{a}, {b}]")));
        }
        if u_start > a || u_start + (u.len() as i64) - 1 < b {
            return Err(Error::InvalidArgument("the window of u must contain [a, b]".into()));
        }
        let uu = |k: i64| u[(k - u_start) as usize];
        let beta = self.beta();
        let eta = self.eta();
        let (aa, ra) = (self.coefficient(a), self.rho(a));
        let (ab, rb) = (self.coefficient(b - 1), self.rho(b - 1));
        let left = if is_even(a) {
            (z * aa + beta) * uu(a) + z * ra * uu(a + 1)
        } else {
            -(z * beta.conj() + aa.conj()) * uu(a) - ra * uu(a + 1)
        };
        let right = if is_even(b) {
            (z * eta + ab) * uu(b) - rb * uu(b - 1)
        } else {
            -(eta.conj() + z * ab.conj()) * uu(b) + z * rb * uu(b - 1)
        };
        let lu = self.pencil(z).lu();
        let ga = self.solve_column(&lu, a)?;
        let gb = self.solve_column(&lu, b)?;
        let idx = (m - a) as usize;
        Ok((uu(m) - ga[idx] * left - gb[idx] * right).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenEntry {
    pub j: i64,
    pub k: i64,
    pub magnitude_product_formula: f64,
    pub value_dense: Complex64,
}

/// Green's function entry of a truncation; see [`FiniteCMV::green_entry`].
pub fn green_entry(op: &FiniteCMV, j: i64, k: i64, z: Complex64) -> Result<GreenEntry> {
    op.green_entry(j, k, z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetTransferCheck {
    /// Frobenius distance between M_n and the determinant expression, with
    /// the Szegő duals taken at degree n − 1
    pub residual: f64,
    /// the same with duals at degree n, kept to show the convention
    pub alternative_residual: f64,
    /// residual / ‖M_n‖_F
    pub relative_residual: f64,
    pub n: usize,
}

/// Compares the n-step transfer matrix with its expression through the
/// characteristic determinants of [1, n−1] and [0, n−1].
///
/// The determinants are those of the plain restrictions, with the
/// coefficients α_{−1}, α_0 and α_{n−1} left in place at the cut ends.
/// With ψ₁ = φ_{[1,n−1]}, ψ₀ = φ_{[0,n−1]} and X = (zψ₁ − ψ₀)/α_{−1},
///
///   M_n = (√z)^{−n} Π ρ_j^{−1} [[zψ₁, X], [z·X*, ψ₁*]]
///
/// where Q*(z) = z^{n−1}·conj(Q(z)) on the unit circle.
pub fn det_transfer_check(
    alpha: &SamplingFunction,
    x: &Phase,
    omega: &Frequency,
    z: &SpectralPoint,
    n: usize,
) -> Result<DetTransferCheck> {
    if n < 2 {
        return Err(Error::InvalidArgument("the relation needs n ≥ 2".into()));
    }
    // α_{−1}, α_0, …, α_{n−1}
    let seq = verblunsky_sequence(alpha, x, omega, -1, n as i64 - 1)?;
    let alpha_m1 = seq[0];
    if alpha_m1.norm() < 1e-8 {
        return Err(Error::DegenerateInput(format!(
            "α_(−1) = {alpha_m1} is too small to divide by"
        )));
    }
    let zz = z.z();
    let hi = n as i64 - 1;
    let psi1 = restricted_char_det(1, hi, &seq[1..], zz).value();
    let psi0 = restricted_char_det(0, hi, &seq, zz).value();
    let x_poly = (zz * psi1 - psi0) / alpha_m1;
    let log_pref: f64 = -seq[1..].iter().map(|&a| rho_of(a).ln()).sum::<f64>();
    let pref = z.sqrt_z().powi(-(n as i32)) * log_pref.exp();
    let transfer = szego_product(&seq[1..], z)?.represented();
    let assemble = |degree: i32| -> Mat2 {
        let zd = zz.powi(degree);
        [
            [pref * zz * psi1, pref * x_poly],
            [pref * zz * zd * x_poly.conj(), pref * zd * psi1.conj()],
        ]
    };
    let residual = mat2_frobenius_dist(&assemble(n as i32 - 1), &transfer);
    let alternative_residual = mat2_frobenius_dist(&assemble(n as i32), &transfer);
    let scale = mat2_frobenius_dist(&transfer, &[[ZERO; 2]; 2]);
    Ok(DetTransferCheck {
        residual,
        alternative_residual,
        relative_residual: residual / scale,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalDecay {
    pub a: i64,
    pub b: i64,
    pub worst_ratio: f64,
    /// pairs (j, k) with |j − k| ≥ n/4 and ratio > 1
    pub violating_pairs: Vec<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenDecayReport {
    pub n: usize,
    pub gamma_ref: f64,
    /// the sub-exponential allowance n^{0.9}
    pub allowance: f64,
    pub intervals: Vec<IntervalDecay>,
    /// the smaller worst ratio of the two intervals
    pub worst_ratio: f64,
    /// worst_ratio ≤ 1
    pub good: bool,
}

/// Exponent of the sub-exponential allowance n^{1−ε}.
pub const GREEN_ALLOWANCE_EXPONENT: f64 = 0.9;

/// max over |j−k| ≥ n/4 of |G(j,k)|·e^{γ|j−k| − n^{0.9}} on [0, n−1] and on
/// [1, n−1], with β = η = 1.
pub fn green_decay_scan(
    alpha: &SamplingFunction,
    omega: &Frequency,
    x: &Phase,
    n: usize,
    z: &SpectralPoint,
    gamma_ref: f64,
) -> Result<GreenDecayReport> {
    if n < 8 {
        return Err(Error::InvalidArgument("green decay scan needs n ≥ 8".into()));
    }
    if !(gamma_ref > 0.0) {
        return Err(Error::InvalidArgument("γ must be positive".into()));
    }
    let allowance = (n as f64).powf(GREEN_ALLOWANCE_EXPONENT);
    let min_sep = (n as f64 / 4.0).ceil() as i64;
    let mut intervals = Vec::with_capacity(2);
    for (lo, hi) in [(0, n as i64 - 1), (1, n as i64 - 1)] {
        let op = FiniteCMV::from_model(alpha, x, omega, lo, hi, ONE, ONE)?;
        let g = op.green_matrix(z.z())?;
        let mut worst = 0.0_f64;
        let mut violating = Vec::new();
        for (kc, col) in g.iter().enumerate() {
            for (jr, v) in col.iter().enumerate() {
                let sep = (jr as i64 - kc as i64).abs();
                if sep < min_sep {
                    continue;
                }
                let ratio = (v.norm().ln() + gamma_ref * sep as f64 - allowance).exp();
                worst = worst.max(ratio);
                if ratio > 1.0 {
                    violating.push((lo + jr as i64, lo + kc as i64));
                }
            }
        }
        intervals.push(IntervalDecay {
            a: lo,
            b: hi,
            worst_ratio: worst,
            violating_pairs: violating,
        });
    }
    let worst_ratio = intervals
        .iter()
        .map(|i| i.worst_ratio)
        .fold(f64::INFINITY, f64::min);
    Ok(GreenDecayReport {
        n,
        gamma_ref,
        allowance,
        intervals,
        worst_ratio,
        good: worst_ratio <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_site_is_unimodular() {
        for (a, beta, eta) in [(0, c(0.0, 1.0), ONE), (3, ONE, c(0.6, 0.8))] {
            let op = FiniteCMV::new(a, a, &[], beta, eta).unwrap();
            let e = op.dense_e();
            assert!((e[(0, 0)].norm() - 1.0).abs() < 1e-15);
            let z = c(0.3, -0.2);
            assert!((op.char_det(z).value - (z - e[(0, 0)])).norm() < 1e-15);
        }
    }

    #[test]
    fn free_truncation_is_signed_permutation() {
        let op = FiniteCMV::new(0, 5, &[ZERO; 5], ONE, ONE).unwrap();
        let e = op.dense_e();
        assert!(e.unitarity_defect() < 1e-12);
        for i in 0..6 {
            let nonzero: Vec<Complex64> = (0..6).map(|j| e[(i, j)]).filter(|v| v.norm() > 1e-15).collect();
            assert_eq!(nonzero.len(), 1);
            assert!((nonzero[0].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_must_be_unimodular() {
        assert!(matches!(
            FiniteCMV::new(0, 3, &[ZERO; 3], c(0.5, 0.0), ONE),
            Err(Error::Boundary { name: "β", .. })
        ));
    }

    #[test]
    fn empty_sub_interval_has_unit_determinant() {
        let op = FiniteCMV::new(0, 3, &[c(0.1, 0.2); 3], ONE, ONE).unwrap();
        assert_eq!(op.sub_char_det(2, 1, c(0.4, 0.1)), ScaledComplex::one());
    }

    #[test]
    fn free_green_function_paths_agree() {
        let op = FiniteCMV::new(0, 7, &[ZERO; 7], ONE, ONE).unwrap();
        let z = Complex64::cis(0.5);
        for j in 0..8 {
            for k in j..8 {
                let g = op.green_entry(j, k, z).unwrap();
                assert!((g.magnitude_product_formula - g.value_dense.norm()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn transfer_relation_at_n2_constant() {
        let a = SamplingFunction::constant(1, c(0.5, 0.0)).unwrap();
        let w = Frequency::with_default_condition(vec![0.3]).unwrap();
        let r = det_transfer_check(&a, &Phase::origin(1), &w, &SpectralPoint::new(0.0), 2).unwrap();
        assert!(r.residual < 1e-9, "{r:?}");
    }

    #[test]
    fn transfer_relation_harmonic() {
        let a = SamplingFunction::harmonic(c(0.5, 0.0), vec![1]).unwrap();
        let w = Frequency::with_default_condition(vec![2f64.sqrt() - 1.0]).unwrap();
        let x = Phase::new(vec![0.3]).unwrap();
        let r = det_transfer_check(&a, &x, &w, &SpectralPoint::new(1.1), 6).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        assert!(r.alternative_residual > 1e-3);
    }

    #[test]
    fn transfer_relation_guards_division() {
        let a = SamplingFunction::zero(1);
        let w = Frequency::with_default_condition(vec![0.3]).unwrap();
        assert!(matches!(
            det_transfer_check(&a, &Phase::origin(1), &w, &SpectralPoint::new(0.4), 4),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn poisson_with_zero_solution() {
        let op = FiniteCMV::new(-3, 4, &[c(0.2, 0.1); 7], ONE, ONE).unwrap();
        let u = vec![ZERO; 12];
        assert_eq!(op.poisson_residual(&u, -5, Complex64::cis(1.0), 0).unwrap(), 0.0);
    }

    #[test]
    fn near_eigenvalue_is_reported() {
        let op = FiniteCMV::new(0, 0, &[], ONE, ONE).unwrap();
        let e = op.dense_e()[(0, 0)];
        assert!(matches!(op.green_column(0, e), Err(Error::NearSingular { .. })));
    }
}
