//! Coined quantum walks on ℤ and their gauge equivalence with extended CMV
//! matrices whose even coefficients vanish.
//!
//! The walk acts on ℓ²(ℤ) ⊗ ℂ² by
//!
//!   [Uψ]_{↑,n} = c¹¹_{n−1} ψ_{↑,n−1} + c¹²_{n−1} ψ_{↓,n−1}
//!   [Uψ]_{↓,n} = c²¹_{n+1} ψ_{↑,n+1} + c²²_{n+1} ψ_{↓,n+1}
//!
//! with C_n = C(x0 + nω). Ordering the basis as ↑_n ↦ 2n+1 and ↓_n ↦ 2n+2,
//! U = D·Ê·D* where D = diag(λ_{k−1}) and Ê is the extended CMV matrix of
//! α̂_{2n} = 0, α̂_{2n+1} = (λ_{2n−1}/λ_{2n})·conj(c²¹_n). The phases come
//! from the polar split c^{kk}_n = r_n ω^k_n and the recursion
//! λ_{2n+2} = ω¹_n λ_{2n}, λ_{2n+1} = conj(ω²_n) λ_{2n−1}, λ₀ = λ_{−1} = 1.
//!
//! Amplitude vectors on a window of sites [s0, s1] interleave the two
//! channels: entry 2(n − s0) is ↑_n and entry 2(n − s0) + 1 is ↓_n.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmvop::FiniteCMV;
use crate::cocycle::{gz_product, szego_product, SpectralPoint};
use crate::error::{Error, Result};
use crate::linalg::{BandMatrix, Mat2};
use crate::lyapunov::{mean_and_stderr, sample_phase};
use crate::model::{coin_field_eval, CoinField};
use crate::torus::{check_dims, Frequency, Phase};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest allowed disagreement between the two expressions for α̂_{2n+1}.
const GAUGE_FORMULA_TOLERANCE: f64 = 1e-10;
/// Mass on the two outermost sites above which a state has escaped.
pub const ESCAPE_THRESHOLD: f64 = 1e-8;
/// Rows dropped at each end of the window by the equivalence check.
pub const EQUIV_TRIM: usize = 4;

fn coins_on_sites(coins: &CoinField, x0: &Phase, omega: &Frequency, lo: i64, hi: i64) -> Result<Vec<Mat2>> {
    check_dims(x0, omega)?;
    (lo..=hi).map(|n| coin_field_eval(coins, &x0.shifted(omega, n))).collect()
}

/// Gauge phases and hatted coefficients on a window of sites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeData {
    pub s0: i64,
    pub s1: i64,
    lambda_lo: i64,
    lambdas: Vec<Complex64>,
    /// α̂_{2n+1} for n = s0 ..= s1, from the c²¹ expression
    odd_alphas: Vec<Complex64>,
    /// max |difference| between the c²¹ and c¹² expressions
    pub formula_gap: f64,
}

impl GaugeData {
    /// λ_k for 2·s0 − 1 ≤ k ≤ 2·s1 + 2 (and any index between the window
    /// and the anchor at 0).
    pub fn lambda(&self, k: i64) -> Complex64 {
        self.lambdas[(k - self.lambda_lo) as usize]
    }

    /// α̂_k for 2·s0 ≤ k ≤ 2·s1 + 1; zero for every even k.
    pub fn alpha_hat(&self, k: i64) -> Complex64 {
        if k.rem_euclid(2) == 0 {
            ZERO
        } else {
            self.odd_alphas[((k - 1) / 2 - self.s0) as usize]
        }
    }

    /// The CMV index range [2·s0 + 1, 2·s1 + 2] of the window.
    pub fn cmv_interval(&self) -> (i64, i64) {
        (2 * self.s0 + 1, 2 * self.s1 + 2)
    }

    /// α̂_{2s0+1}, …, α̂_{2s1+1}: the interior coefficients of the window's
    /// CMV truncation.
    pub fn interior_coefficients(&self) -> Vec<Complex64> {
        let (a, b) = self.cmv_interval();
        (a..b).map(|k| self.alpha_hat(k)).collect()
    }

    /// D_kk = λ_{k−1} over the CMV index range of the window.
    pub fn diagonal(&self) -> Vec<Complex64> {
        let (a, b) = self.cmv_interval();
        (a..=b).map(|k| self.lambda(k - 1)).collect()
    }

    /// Rows (k, λ_k, α̂_k) for k over the CMV index range of the window.
    pub fn rows(&self) -> Vec<(i64, Complex64, Complex64)> {
        let (a, b) = self.cmv_interval();
        (a - 1..b).map(|k| (k, self.lambda(k), self.alpha_hat(k))).collect()
    }
}

/// The gauge on sites [s0, s1] from already evaluated coins: `coin_at(n)`
/// returns C_n for every site between min(s0, 0) and max(s1, 0).
pub fn gauge_from_coins(s0: i64, s1: i64, coin_at: impl Fn(i64) -> Mat2) -> Result<GaugeData> {
    if s1 < s0 {
        return Err(Error::InvalidArgument(format!("empty window [{s0}, {s1}]")));
    }
    let lo = (2 * s0 - 1).min(-1);
    let hi = (2 * s1 + 2).max(0);
    let mut lambdas = vec![ONE; (hi - lo + 1) as usize];
    let idx = |k: i64| (k - lo) as usize;
    let polar = |n: i64| -> Result<(Complex64, Complex64)> {
        let c = coin_at(n);
        let (d1, d2) = (c[0][0].norm(), c[1][1].norm());
        if d1 == 0.0 || d2 == 0.0 {
            return Err(Error::Gauge(format!("coin at site {n} has a vanishing diagonal entry")));
        }
        Ok((c[0][0] / d1, c[1][1] / d2))
    };
    // forward from the anchor λ₀ = λ_{−1} = 1
    let mut n = 0;
    while 2 * n + 1 <= hi {
        let (w1, w2) = polar(n)?;
        if 2 * n + 2 <= hi {
            lambdas[idx(2 * n + 2)] = w1 * lambdas[idx(2 * n)];
        }
        lambdas[idx(2 * n + 1)] = w2.conj() * lambdas[idx(2 * n - 1)];
        n += 1;
    }
    // backward: λ_{2n} = λ_{2n+2}/ω¹_n and λ_{2n−1} = ω²_n λ_{2n+1}
    let mut n = -1;
    while 2 * n - 1 >= lo {
        let (w1, w2) = polar(n)?;
        lambdas[idx(2 * n)] = lambdas[idx(2 * n + 2)] * w1.conj();
        lambdas[idx(2 * n - 1)] = w2 * lambdas[idx(2 * n + 1)];
        n -= 1;
    }
    let mut odd_alphas = Vec::with_capacity((s1 - s0 + 1) as usize);
    let mut formula_gap = 0.0_f64;
    for n in s0..=s1 {
        let c = coin_at(n);
        let l = |k: i64| lambdas[idx(k)];
        let from_c21 = l(2 * n - 1) / l(2 * n) * c[1][0].conj();
        let from_c12 = -(l(2 * n + 1) / l(2 * n + 2)) * c[0][1];
        let gap = (from_c21 - from_c12).norm();
        if gap > GAUGE_FORMULA_TOLERANCE {
            return Err(Error::Gauge(format!(
                "the two expressions for the coefficient at site {n} differ by {gap:.3e}; the coin is not in SU(2)"
            )));
        }
        formula_gap = formula_gap.max(gap);
        odd_alphas.push(from_c21);
    }
    Ok(GaugeData {
        s0,
        s1,
        lambda_lo: lo,
        lambdas,
        odd_alphas,
        formula_gap,
    })
}

/// Gauge phases and hatted coefficients of the walk on sites [s0, s1].
pub fn walk_to_cmv(coins: &CoinField, x0: &Phase, omega: &Frequency, s0: i64, s1: i64) -> Result<GaugeData> {
    let lo = s0.min(0);
    let hi = s1.max(0);
    let c = coins_on_sites(coins, x0, omega, lo, hi)?;
    gauge_from_coins(s0, s1, |n| c[(n - lo) as usize])
}

/// The update rule on the window; amplitude that would enter from outside
/// is absent, so the matrix is unitary only up to its two boundary sites.
fn update_rule_matrix(coins: &[Mat2]) -> BandMatrix {
    let w = coins.len();
    let mut u = BandMatrix::zeros(2 * w, 2, 2);
    for (n, c) in coins.iter().enumerate() {
        let up = 2 * n;
        // ↑_{n+1} ← C_n(1, ·),  ↓_{n−1} ← C_n(2, ·)
        if n + 1 < w {
            u.set(up + 2, up, c[0][0]);
            u.set(up + 2, up + 1, c[0][1]);
        }
        if n >= 1 {
            u.set(up - 1, up, c[1][0]);
            u.set(up - 1, up + 1, c[1][1]);
        }
    }
    u
}

/// How the finite window is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    /// D·Ê^{1,1}·D*, unitary
    #[default]
    Reflective,
    /// the bare update rule; amplitude leaving the window is lost
    Absorbing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOperator {
    pub s0: i64,
    pub s1: i64,
    pub closure: Closure,
    coins: Vec<Mat2>,
    matrix: BandMatrix,
}

impl WalkOperator {
    pub fn sites(&self) -> usize {
        (self.s1 - self.s0 + 1) as usize
    }

    pub fn coins(&self) -> &[Mat2] {
        &self.coins
    }

    pub fn matrix(&self) -> &BandMatrix {
        &self.matrix
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(psi)
    }
}

/// The walk on sites [s0, s1] with the chosen closure.
pub fn build_walk(
    coins: &CoinField,
    x0: &Phase,
    omega: &Frequency,
    s0: i64,
    s1: i64,
    closure: Closure,
) -> Result<WalkOperator> {
    if s1 <= s0 {
        return Err(Error::InvalidArgument("a walk window needs at least two sites".into()));
    }
    let site_coins = coins_on_sites(coins, x0, omega, s0, s1)?;
    let matrix = match closure {
        Closure::Absorbing => update_rule_matrix(&site_coins),
        Closure::Reflective => {
            let gauge = walk_to_cmv(coins, x0, omega, s0, s1)?;
            let (a, b) = gauge.cmv_interval();
            let e = FiniteCMV::new(a, b, &gauge.interior_coefficients(), ONE, ONE)?;
            let d = gauge.diagonal();
            let eb = e.e_band();
            let mut u = BandMatrix::zeros(eb.dim(), 2, 2);
            for i in 0..eb.dim() {
                for j in eb.row_range(i) {
                    let v = eb.get(i, j);
                    if v != ZERO {
                        u.set(i, j, d[i] * v * d[j].conj());
                    }
                }
            }
            u
        }
    };
    Ok(WalkOperator {
        s0,
        s1,
        closure,
        coins: site_coins,
        matrix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivReport {
    /// max |D*UD − Ê| over the compared rows
    pub residual: f64,
    pub rows_compared: usize,
    /// max |λ_k| − 1 over the window
    pub lambda_defect: f64,
    pub formula_gap: f64,
}

/// Compares D*·U·D, with U taken from the update rule, against the extended
/// CMV matrix of the hatted coefficients, skipping 4 rows at each end.
pub fn unitary_equiv_check(
    coins: &CoinField,
    x0: &Phase,
    omega: &Frequency,
    s0: i64,
    s1: i64,
) -> Result<EquivReport> {
    let sites = (s1 - s0 + 1).max(0) as usize;
    if 2 * sites <= 2 * EQUIV_TRIM + 2 {
        return Err(Error::InvalidArgument(format!(
            "window of {sites} sites leaves no interior rows after trimming"
        )));
    }
    let gauge = walk_to_cmv(coins, x0, omega, s0, s1)?;
    let site_coins = coins_on_sites(coins, x0, omega, s0, s1)?;
    let u = update_rule_matrix(&site_coins);
    let (a, b) = gauge.cmv_interval();
    let e = FiniteCMV::new(a, b, &gauge.interior_coefficients(), ONE, ONE)?;
    let eb = e.e_band();
    let d = gauge.diagonal();
    let dim = u.dim();
    let mut residual = 0.0_f64;
    for i in EQUIV_TRIM..dim - EQUIV_TRIM {
        for j in i.saturating_sub(2)..(i + 3).min(dim) {
            let gauged = d[i].conj() * u.get(i, j) * d[j];
            residual = residual.max((gauged - eb.get(i, j)).norm());
        }
    }
    let lambda_defect = d.iter().map(|l| (l.norm() - 1.0).abs()).fold(0.0, f64::max);
    Ok(EquivReport {
        residual,
        rows_compared: dim - 2 * EQUIV_TRIM,
        lambda_defect,
        formula_gap: gauge.formula_gap,
    })
}

/// Amplitudes on a window of sites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkState {
    pub s0: i64,
    pub s1: i64,
    /// interleaved (↑_n, ↓_n) for n = s0 ..= s1
    pub amplitudes: Vec<Complex64>,
}

impl WalkState {
    /// A normalized spinor (up, down) on a single site.
    pub fn localized(s0: i64, s1: i64, site: i64, up: Complex64, down: Complex64) -> Result<Self> {
        if !(s0..=s1).contains(&site) {
            return Err(Error::InvalidArgument(format!("site {site} outside [{s0}, {s1}]")));
        }
        let norm = (up.norm_sqr() + down.norm_sqr()).sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("zero spinor".into()));
        }
        let mut amplitudes = vec![ZERO; 2 * (s1 - s0 + 1) as usize];
        let i = 2 * (site - s0) as usize;
        amplitudes[i] = up / norm;
        amplitudes[i + 1] = down / norm;
        Ok(WalkState { s0, s1, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |ψ_↑,n|² + |ψ_↓,n|² per site.
    pub fn site_probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .chunks_exact(2)
            .map(|p| p[0].norm_sqr() + p[1].norm_sqr())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: usize,
    pub norm: f64,
    /// Σ n·p_n / Σ p_n
    pub mean: f64,
    pub sigma: f64,
    /// |⟨ψ_t, ψ_0⟩|²
    pub return_prob: f64,
    /// set from the first step at which more than 1e−8 of the mass sits on
    /// the two outermost sites
    pub escaped: bool,
}

fn summarize(t: usize, psi: &WalkState, psi0: &WalkState, escaped: bool) -> TrajectoryRow {
    let p = psi.site_probabilities();
    let total: f64 = p.iter().sum();
    let mean = p.iter().enumerate().map(|(i, w)| (psi.s0 + i as i64) as f64 * w).sum::<f64>() / total;
    let var = p
        .iter()
        .enumerate()
        .map(|(i, w)| ((psi.s0 + i as i64) as f64 - mean).powi(2) * w)
        .sum::<f64>()
        / total;
    let overlap: Complex64 = psi0.amplitudes.iter().zip(&psi.amplitudes).map(|(a, b)| a.conj() * b).sum();
    TrajectoryRow {
        t,
        norm: total.sqrt(),
        mean,
        sigma: var.max(0.0).sqrt(),
        return_prob: overlap.norm_sqr(),
        escaped,
    }
}

/// Summary rows for t = 0 ..= steps, together with the final state.
pub fn evolve(walk: &WalkOperator, psi0: &WalkState, steps: usize) -> Result<(Vec<TrajectoryRow>, WalkState)> {
    if psi0.s0 != walk.s0 || psi0.s1 != walk.s1 {
        return Err(Error::InvalidArgument("state and walk live on different windows".into()));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("initial state has norm {}", psi0.norm())));
    }
    let edge_mass = |s: &WalkState| {
        let p = s.site_probabilities();
        p[0] + p[p.len() - 1]
    };
    let mut escaped = edge_mass(psi0) > ESCAPE_THRESHOLD;
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(summarize(0, psi0, psi0, escaped));
    let mut psi = psi0.clone();
    for t in 1..=steps {
        psi.amplitudes = walk.apply(&psi.amplitudes);
        escaped = escaped || edge_mass(&psi) > ESCAPE_THRESHOLD;
        rows.push(summarize(t, &psi, psi0, escaped));
    }
    Ok((rows, psi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkLyapunov {
    pub z: SpectralPoint,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// (1/n)·E log‖G_n‖ for the GZ product of the hatted coefficients
    pub l_walk: f64,
    pub l_walk_stderr: f64,
    /// (1/n)·E log‖M_{2n}‖ for the Szegő product of the same coefficients
    pub l_hat: f64,
    pub l_hat_stderr: f64,
}

impl WalkLyapunov {
    pub fn difference(&self) -> f64 {
        (self.l_walk - self.l_hat).abs()
    }

    /// Whether the two estimates agree within three combined standard
    /// errors (or to round-off when both errors vanish).
    pub fn consistent(&self) -> bool {
        self.difference() <= 3.0 * (self.l_walk_stderr + self.l_hat_stderr) + 1e-12
    }
}

/// Both Lyapunov exponents of the walk at z, per coin step.
///
/// Each sampled phase x gives the coins C(x + jω), j = 0..n, and their
/// hatted sequence 0, α̂₁, 0, α̂₃, …. The walk exponent uses n GZ steps on
/// the pairs (0, α̂_{2j+1}); the CMV exponent uses the 2n Szegő steps of the
/// interleaved sequence. Both are normalized by the n coin steps.
pub fn walk_lyapunov_compare(
    coins: &CoinField,
    omega: &Frequency,
    z: &SpectralPoint,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<WalkLyapunov> {
    if n < 1 || samples < 1 {
        return Err(Error::InvalidArgument("need n ≥ 1 and samples ≥ 1".into()));
    }
    let d = coins.dim();
    let pairs: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = sample_phase(d, seed, i);
            let gauge = walk_to_cmv(coins, &x, omega, 0, n as i64 - 1)?;
            let seq: Vec<Complex64> = (0..2 * n as i64).map(|k| gauge.alpha_hat(k)).collect();
            let g = gz_product(&seq, z)?.log_norm();
            let s = szego_product(&seq, z)?.log_norm();
            Ok((g / n as f64, s / n as f64))
        })
        .collect::<Result<_>>()?;
    let (walk, hat): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (l_walk, l_walk_stderr) = mean_and_stderr(&walk);
    let (l_hat, l_hat_stderr) = mean_and_stderr(&hat);
    Ok(WalkLyapunov {
        z: *z,
        n,
        samples,
        seed,
        l_walk,
        l_walk_stderr,
        l_hat,
        l_hat_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d() -> (Phase, Frequency) {
        (
            Phase::origin(1),
            Frequency::with_default_condition(vec![2f64.sqrt() - 1.0]).unwrap(),
        )
    }

    #[test]
    fn identity_coins_shift_channels() {
        let (x, w) = one_d();
        let walk = build_walk(&CoinField::identity(1), &x, &w, -5, 5, Closure::Reflective).unwrap();
        let up = WalkState::localized(-5, 5, 0, ONE, ZERO).unwrap();
        let out = walk.apply(&up.amplitudes);
        assert_eq!(out[2 * 6], ONE);
        let down = WalkState::localized(-5, 5, 0, ZERO, ONE).unwrap();
        let out = walk.apply(&down.amplitudes);
        assert_eq!(out[2 * 4 + 1], ONE);
    }

    #[test]
    fn hadamard_single_step() {
        let (x, w) = one_d();
        let walk = build_walk(&CoinField::hadamard(1), &x, &w, -5, 5, Closure::Reflective).unwrap();
        let psi = WalkState::localized(-5, 5, 0, ONE, ZERO).unwrap();
        let out = walk.apply(&psi.amplitudes);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out[2 * 6] - s).norm() < 1e-15);
        assert!((out[2 * 4 + 1] + s).norm() < 1e-15);
    }

    #[test]
    fn hadamard_gauge_is_trivial() {
        let (x, w) = one_d();
        let g = walk_to_cmv(&CoinField::hadamard(1), &x, &w, -3, 3).unwrap();
        for k in -7..=8 {
            assert!((g.lambda(k) - ONE).norm() < 1e-15);
        }
        for k in -5..=7 {
            let expect = if k % 2 == 0 { 0.0 } else { -std::f64::consts::FRAC_1_SQRT_2 };
            assert!((g.alpha_hat(k) - expect).norm() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn identity_equivalence_is_exact() {
        let (x, w) = one_d();
        let r = unitary_equiv_check(&CoinField::identity(1), &x, &w, 0, 31).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn zero_steps_gives_initial_row() {
        let (x, w) = one_d();
        let walk = build_walk(&CoinField::hadamard(1), &x, &w, -5, 5, Closure::Reflective).unwrap();
        let psi = WalkState::localized(-5, 5, 0, ONE, ZERO).unwrap();
        let (rows, _) = evolve(&walk, &psi, 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].return_prob, 1.0);
    }

    #[test]
    fn identity_walk_has_zero_exponents() {
        let w = Frequency::default_2d();
        let r = walk_lyapunov_compare(&CoinField::identity(2), &w, &SpectralPoint::new(0.4), 50, 4, 0).unwrap();
        assert!(r.l_walk.abs() < 1e-14);
        assert!(r.l_hat.abs() < 1e-14);
    }

    #[test]
    fn hadamard_exponent_closed_form() {
        let w = Frequency::default_2d();
        let r = walk_lyapunov_compare(&CoinField::hadamard(2), &w, &SpectralPoint::new(0.0), 400, 2, 0).unwrap();
        let exact = (2f64.sqrt() + 1.0).ln();
        assert!((r.l_walk - exact).abs() < 5e-3, "{r:?}");
        assert!((r.l_hat - exact).abs() < 5e-3);
        assert!(r.consistent());
    }
}
