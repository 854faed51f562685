//! Sampling functions α: 𝕋^d → 𝔻 given as trigonometric polynomials, and
//! SU(2) coin fields for quantum walks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::torus::{Frequency, Phase};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Grid points per dimension used to certify sup|α| < 1.
pub const CERTIFICATION_GRID: usize = 256;
/// Cap on the total number of certification points in high dimension.
const MAX_CERTIFICATION_POINTS: usize = 1 << 20;

/// ρ = √(1 − |α|²), evaluated as √((1−|α|)(1+|α|)) to keep digits when
/// |α| is close to 1.
pub fn rho_of(alpha: Complex64) -> f64 {
    let a = alpha.norm();
    ((1.0 - a) * (1.0 + a)).max(0.0).sqrt()
}

/// One term of a trigonometric polynomial in the JSON model schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub k: Vec<i32>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// JSON form of a trigonometric polynomial: `{"terms": [...]}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPolySpec {
    pub terms: Vec<TrigTerm>,
}

/// f(x) = Σ_k c_k e^{2πi k·x} with finitely many k ∈ ℤ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    terms: Vec<(Vec<i32>, Complex64)>,
    /// largest |k_j| per coordinate, sizes the power tables in `eval`
    kmax: Vec<usize>,
}

impl TrigPoly {
    pub fn new(dim: usize, terms: Vec<(Vec<i32>, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("trigonometric polynomial needs d ≥ 1".into()));
        }
        let mut kmax = vec![0usize; dim];
        for (k, c) in &terms {
            if k.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "frequency vector {k:?} does not have dimension {dim}"
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite coefficient at {k:?}")));
            }
            for (m, &kj) in kmax.iter_mut().zip(k) {
                *m = (*m).max(kj.unsigned_abs() as usize);
            }
        }
        Ok(TrigPoly { dim, terms, kmax })
    }

    pub fn zero(dim: usize) -> Self {
        TrigPoly {
            dim: dim.max(1),
            terms: Vec::new(),
            kmax: vec![0; dim.max(1)],
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::new(dim.max(1), vec![(vec![0; dim.max(1)], c)]).expect("constant term is valid")
    }

    pub fn from_spec(dim: usize, spec: &TrigPolySpec) -> Result<Self> {
        Self::new(
            dim,
            spec.terms
                .iter()
                .map(|t| (t.k.clone(), Complex64::new(t.re, t.im)))
                .collect(),
        )
    }

    pub fn to_spec(&self) -> TrigPolySpec {
        TrigPolySpec {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TrigTerm {
                    k: k.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<i32>, Complex64)] {
        &self.terms
    }

    /// max |k|₁ over the terms
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(k, _)| k.iter().map(|v| v.unsigned_abs()).sum())
            .max()
            .unwrap_or(0)
    }

    /// Σ|c_k|, a bound on sup|f|.
    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    /// Σ 2π|k|₁|c_k|: a Lipschitz constant of f with respect to the sup
    /// norm on coordinates.
    pub fn lipschitz_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let l1: u32 = k.iter().map(|v| v.unsigned_abs()).sum();
                2.0 * PI * l1 as f64 * c.norm()
            })
            .sum()
    }

    /// Σ(2π|k|₁)²|c_k|, a bound on every second directional derivative
    /// along unit sup-norm directions.
    pub fn curvature_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let l1: u32 = k.iter().map(|v| v.unsigned_abs()).sum();
                (2.0 * PI * l1 as f64).powi(2) * c.norm()
            })
            .sum()
    }

    /// The pointwise complex conjugate.
    pub fn conj(&self) -> TrigPoly {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.iter().map(|v| -v).collect(), c.conj()))
                .collect(),
            kmax: self.kmax.clone(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        if self.terms.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        debug_assert_eq!(x.len(), self.dim);
        // table of e^{2πi m x_j} for m in −kmax_j..=kmax_j, all coordinates
        let mut table = Vec::with_capacity(self.kmax.iter().map(|k| 2 * k + 1).sum());
        let mut offsets = Vec::with_capacity(self.dim);
        for (&xj, &km) in x.iter().zip(&self.kmax) {
            let start = table.len();
            offsets.push(start + km);
            table.resize(start + 2 * km + 1, ONE);
            let base = Complex64::cis(2.0 * PI * xj);
            let inv = base.conj();
            for m in 1..=km {
                table[start + km + m] = table[start + km + m - 1] * base;
                table[start + km - m] = table[start + km - m + 1] * inv;
            }
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut t = *c;
            for (kj, off) in k.iter().zip(&offsets) {
                t *= table[(*off as i64 + *kj as i64) as usize];
            }
            sum += t;
        }
        sum
    }

    /// Pointwise product of two polynomials on the same torus.
    pub fn product(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if self.dim != other.dim {
            return Err(Error::InvalidArgument("dimension mismatch in product".into()));
        }
        let mut acc: std::collections::BTreeMap<Vec<i32>, Complex64> = Default::default();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let k: Vec<i32> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                *acc.entry(k).or_default() += c1 * c2;
            }
        }
        TrigPoly::new(self.dim, acc.into_iter().collect())
    }

    /// The same polynomial read as a function of one coordinate `axis` of a
    /// `dim`-dimensional torus.
    pub fn embed(&self, dim: usize, axis: usize) -> Result<TrigPoly> {
        if self.dim != 1 || axis >= dim {
            return Err(Error::InvalidArgument("embed needs a one-dimensional polynomial".into()));
        }
        TrigPoly::new(
            dim,
            self.terms
                .iter()
                .map(|(k, c)| {
                    let mut kk = vec![0; dim];
                    kk[axis] = k[0];
                    (kk, *c)
                })
                .collect(),
        )
    }
}

/// Calls `f` on every point of the uniform grid {i/g}^d.
fn for_each_grid_point(dim: usize, g: usize, mut f: impl FnMut(&[f64])) {
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    loop {
        for (xj, &ij) in x.iter_mut().zip(&idx) {
            *xj = ij as f64 / g as f64;
        }
        f(&x);
        let mut j = 0;
        loop {
            if j == dim {
                return;
            }
            idx[j] += 1;
            if idx[j] < g {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn grid_per_dim(dim: usize) -> usize {
    let mut g = CERTIFICATION_GRID;
    while g > 8 && g.saturating_pow(dim as u32) > MAX_CERTIFICATION_POINTS {
        g /= 2;
    }
    g
}

/// An analytic sampling function α: 𝕋^d → 𝔻 with a certified bound
/// sup|α| ≤ sup_bound < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingFunction {
    poly: TrigPoly,
    sup_bound: f64,
}

impl SamplingFunction {
    /// Certifies sup|α| < 1 and wraps the polynomial.
    ///
    /// The bound is the smallest of Σ|c_k|, the grid maximum plus a
    /// Lipschitz margin, and a curvature bound on |α|². Every point of the
    /// torus lies within half a grid spacing h (in each coordinate) of a
    /// grid node, so the Lipschitz margin is (h/2)·Σ2π|k|₁|c_k|. At a
    /// maximum of the real polynomial p = |α|² the gradient vanishes, hence
    /// max p ≤ grid max p + ½(h/2)²·Σ(2π|k|₁)²|p_k|.
    pub fn new(poly: TrigPoly) -> Result<Self> {
        let coeff_bound = poly.coefficient_sum();
        let mut bound = coeff_bound;
        if coeff_bound >= 1.0 {
            let g = grid_per_dim(poly.dim());
            let mut grid_max = 0.0_f64;
            for_each_grid_point(poly.dim(), g, |x| {
                grid_max = grid_max.max(poly.eval(x).norm());
            });
            let half = 0.5 / g as f64;
            bound = bound.min(grid_max + half * poly.lipschitz_bound());
            let curvature = poly.product(&poly.conj())?.curvature_bound();
            bound = bound.min((grid_max * grid_max + 0.5 * half * half * curvature).sqrt());
        }
        if !(bound < 1.0) {
            return Err(Error::ModelViolation(format!(
                "cannot certify sup|α| < 1 (best bound {bound:.6})"
            )));
        }
        Ok(SamplingFunction {
            poly,
            sup_bound: bound,
        })
    }

    pub fn from_spec(dim: usize, spec: &TrigPolySpec) -> Result<Self> {
        Self::new(TrigPoly::from_spec(dim, spec)?)
    }

    /// α ≡ 0
    pub fn zero(dim: usize) -> Self {
        SamplingFunction {
            poly: TrigPoly::zero(dim),
            sup_bound: 0.0,
        }
    }

    /// α ≡ c
    pub fn constant(dim: usize, c: Complex64) -> Result<Self> {
        Self::new(TrigPoly::constant(dim, c))
    }

    /// λ·e^{2πi k·x}
    pub fn harmonic(lambda: Complex64, k: Vec<i32>) -> Result<Self> {
        let d = k.len();
        Self::new(TrigPoly::new(d, vec![(k, lambda)])?)
    }

    /// λ(cos 2πx₁ + cos 2πx₂)/2 on 𝕋².
    pub fn real_trig(lambda: f64) -> Result<Self> {
        let h = Complex64::new(lambda / 4.0, 0.0);
        Self::new(TrigPoly::new(
            2,
            vec![(vec![1, 0], h), (vec![-1, 0], h), (vec![0, 1], h), (vec![0, -1], h)],
        )?)
    }

    /// λ·Π_j g(x_j) with g a degree-`m` trigonometric approximation of
    /// t ↦ e^{iK cos 2πt}. Since |g| ≈ 1 the modulus stays close to λ while
    /// the phase winds strongly, which gives a large Lyapunov exponent
    /// across the whole spectrum.
    pub fn phase_modulated(lambda: f64, coupling: f64, m: usize, dim: usize) -> Result<Self> {
        let g = phase_kick_poly(coupling, m)?;
        let mut poly = TrigPoly::constant(dim, Complex64::new(lambda, 0.0));
        for axis in 0..dim {
            poly = poly.product(&g.embed(dim, axis)?)?;
        }
        Self::new(poly)
    }

    /// The strong-coupling preset used by the experiments:
    /// λ = 0.85, K = 2.5, degree 8, d = 2.
    pub fn strong_coupling() -> Self {
        Self::phase_modulated(0.85, 2.5, 8, 2).expect("preset certifies")
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn poly(&self) -> &TrigPoly {
        &self.poly
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// α(x) without the |α| < 1 check.
    pub fn eval(&self, x: &Phase) -> Complex64 {
        self.poly.eval(x.coords())
    }

    /// (α(x), ρ(x)).
    pub fn eval_alpha_rho(&self, x: &Phase) -> Result<(Complex64, f64)> {
        if x.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "phase has d = {} but the model has d = {}",
                x.dim(),
                self.dim()
            )));
        }
        let a = self.eval(x);
        checked_alpha(a)?;
        Ok((a, rho_of(a)))
    }
}

pub(crate) fn checked_alpha(a: Complex64) -> Result<Complex64> {
    if !(a.norm() < 1.0) {
        return Err(Error::ModelViolation(format!(
            "Verblunsky coefficient {a} is not in the open unit disk"
        )));
    }
    Ok(a)
}

/// Trigonometric approximation of t ↦ e^{iK cos 2πt} of degree m, with
/// coefficients from a 64-point discrete Fourier transform (close to
/// i^m J_m(K)).
pub fn phase_kick_poly(coupling: f64, m: usize) -> Result<TrigPoly> {
    const N: usize = 64;
    if m >= N / 2 {
        return Err(Error::InvalidArgument(format!("degree {m} too large")));
    }
    let samples: Vec<Complex64> = (0..N)
        .map(|t| Complex64::cis(coupling * (2.0 * PI * t as f64 / N as f64).cos()))
        .collect();
    let terms = (-(m as i32)..=m as i32)
        .map(|k| {
            let c: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(t, s)| s * Complex64::cis(-2.0 * PI * (k as f64) * t as f64 / N as f64))
                .sum();
            (vec![k], c / N as f64)
        })
        .collect();
    TrigPoly::new(1, terms)
}

/// The sequence α(x0 + nω), n = n_from ..= n_to.
pub fn verblunsky_sequence(
    alpha: &SamplingFunction,
    x0: &Phase,
    omega: &Frequency,
    n_from: i64,
    n_to: i64,
) -> Result<Vec<Complex64>> {
    if n_from > n_to {
        return Err(Error::InvalidArgument(format!("empty range {n_from}..={n_to}")));
    }
    crate::torus::check_dims(x0, omega)?;
    (n_from..=n_to)
        .map(|n| alpha.eval_alpha_rho(&x0.shifted(omega, n)).map(|(a, _)| a))
        .collect()
}

/// Riemann sum of log(1 − |α(x)|) over the grid {i/g}^d.
pub fn log_integrability(alpha: &SamplingFunction, grid_per_dim: usize) -> Result<f64> {
    if grid_per_dim < 2 {
        return Err(Error::InvalidArgument("grid_per_dim must be ≥ 2".into()));
    }
    let mut values = Vec::with_capacity(grid_per_dim.pow(alpha.dim() as u32));
    for_each_grid_point(alpha.dim(), grid_per_dim, |x| {
        values.push((1.0 - alpha.poly.eval(x).norm()).ln());
    });
    Ok(crate::lyapunov::pairwise_sum(&values) / values.len() as f64)
}

/// JSON form of a coin field: either the four entries as polynomials, or
/// an angle pair (θ, ψ) giving [[cos θ, e^{iψ} sin θ], [−e^{−iψ} sin θ, cos θ]].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CoinSpec {
    Entries {
        c11: TrigPolySpec,
        c12: TrigPolySpec,
        c21: TrigPolySpec,
        c22: TrigPolySpec,
    },
    Angles {
        theta: TrigPolySpec,
        psi: TrigPolySpec,
    },
}

/// A field of 2×2 coins C(x) with det C = 1.
#[derive(Debug, Clone, PartialEq)]
pub enum CoinField {
    Entries([TrigPoly; 4]),
    /// θ and ψ are real angles; only the real part of each polynomial is used
    Angles { theta: TrigPoly, psi: TrigPoly },
}

/// Worst-case numbers found while certifying a coin field on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoinCertificate {
    pub max_det_defect: f64,
    pub min_diagonal: f64,
    pub max_offdiagonal: f64,
}

impl CoinField {
    pub fn from_spec(dim: usize, spec: &CoinSpec) -> Result<Self> {
        Ok(match spec {
            CoinSpec::Entries { c11, c12, c21, c22 } => CoinField::Entries([
                TrigPoly::from_spec(dim, c11)?,
                TrigPoly::from_spec(dim, c12)?,
                TrigPoly::from_spec(dim, c21)?,
                TrigPoly::from_spec(dim, c22)?,
            ]),
            CoinSpec::Angles { theta, psi } => CoinField::Angles {
                theta: TrigPoly::from_spec(dim, theta)?,
                psi: TrigPoly::from_spec(dim, psi)?,
            },
        })
    }

    pub fn constant(dim: usize, c: Mat2) -> Self {
        CoinField::Entries([
            TrigPoly::constant(dim, c[0][0]),
            TrigPoly::constant(dim, c[0][1]),
            TrigPoly::constant(dim, c[1][0]),
            TrigPoly::constant(dim, c[1][1]),
        ])
    }

    pub fn identity(dim: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::constant(dim, [[ONE, z], [z, ONE]])
    }

    /// (1/√2)[[1, 1], [−1, 1]]
    pub fn hadamard(dim: usize) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::constant(dim, [[h, h], [-h, h]])
    }

    /// [[cos θ(x), sin θ(x)], [−sin θ(x), cos θ(x)]] with θ(x) = 2πx₁,
    /// written with trigonometric-polynomial entries.
    pub fn full_turn_rotation(dim: usize) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let ihalf = Complex64::new(0.0, 0.5);
        let mut plus = vec![0; dim];
        plus[0] = 1;
        let mut minus = vec![0; dim];
        minus[0] = -1;
        let cos = TrigPoly::new(dim, vec![(plus.clone(), half), (minus.clone(), half)]).unwrap();
        // sin t = (e^{it} − e^{−it}) / 2i
        let sin = TrigPoly::new(dim, vec![(plus, -ihalf), (minus, ihalf)]).unwrap();
        let neg_sin = TrigPoly::new(
            dim,
            sin.terms().iter().map(|(k, c)| (k.clone(), -c)).collect(),
        )
        .unwrap();
        CoinField::Entries([cos.clone(), sin, neg_sin, cos])
    }

    /// Angle field θ(x) = θ₀ + a·cos 2πx₁, ψ(x) = b·cos 2πx₂ on 𝕋².
    pub fn quasi_periodic_rotation(theta0: f64, a: f64, b: f64) -> Self {
        let cos_axis = |axis: usize, amp: f64| {
            let mut plus = vec![0, 0];
            plus[axis] = 1;
            let mut minus = vec![0, 0];
            minus[axis] = -1;
            let h = Complex64::new(amp / 2.0, 0.0);
            TrigPoly::new(2, vec![(plus, h), (minus, h)]).unwrap()
        };
        let mut theta_terms = cos_axis(0, a).terms().to_vec();
        theta_terms.push((vec![0, 0], Complex64::new(theta0, 0.0)));
        CoinField::Angles {
            theta: TrigPoly::new(2, theta_terms).unwrap(),
            psi: cos_axis(1, b),
        }
    }

    /// Constant mixing angle with sin θ₀ = `s` and a phase kick
    /// ψ(x) = K(cos 2πx₁ + cos 2πx₂). The hatted Verblunsky coefficients
    /// are −s·e^{iψ(x)}, a strongly coupled quasi-periodic sequence.
    pub fn phase_kicked(s: f64, coupling: f64) -> Self {
        let h = Complex64::new(coupling / 2.0, 0.0);
        CoinField::Angles {
            theta: TrigPoly::constant(2, Complex64::new(s.asin(), 0.0)),
            psi: TrigPoly::new(
                2,
                vec![(vec![1, 0], h), (vec![-1, 0], h), (vec![0, 1], h), (vec![0, -1], h)],
            )
            .unwrap(),
        }
    }

    /// The localization preset for walks: sin θ₀ = 0.85, K = 2.5.
    pub fn strong_coupling() -> Self {
        Self::phase_kicked(0.85, 2.5)
    }

    pub fn dim(&self) -> usize {
        match self {
            CoinField::Entries(c) => c[0].dim(),
            CoinField::Angles { theta, .. } => theta.dim(),
        }
    }

    /// C(x) without any checks.
    pub fn eval_raw(&self, x: &[f64]) -> Mat2 {
        match self {
            CoinField::Entries(c) => [[c[0].eval(x), c[1].eval(x)], [c[2].eval(x), c[3].eval(x)]],
            CoinField::Angles { theta, psi } => {
                let t = theta.eval(x).re;
                let p = psi.eval(x).re;
                let e = Complex64::cis(p);
                let (s, c) = t.sin_cos();
                let cc = Complex64::new(c, 0.0);
                [[cc, e * s], [-e.conj() * s, cc]]
            }
        }
    }

    /// Grid check of det = 1 and nonvanishing diagonal.
    pub fn certify(&self) -> Result<CoinCertificate> {
        let g = grid_per_dim(self.dim());
        let mut cert = CoinCertificate {
            max_det_defect: 0.0,
            min_diagonal: f64::INFINITY,
            max_offdiagonal: 0.0,
        };
        for_each_grid_point(self.dim(), g, |x| {
            let c = self.eval_raw(x);
            cert.max_det_defect = cert
                .max_det_defect
                .max((crate::linalg::mat2_det(&c) - ONE).norm());
            cert.min_diagonal = cert.min_diagonal.min(c[0][0].norm()).min(c[1][1].norm());
            cert.max_offdiagonal = cert.max_offdiagonal.max(c[1][0].norm()).max(c[0][1].norm());
        });
        if cert.max_det_defect > DET_TOLERANCE || cert.min_diagonal <= DIAGONAL_FLOOR {
            return Err(Error::ModelViolation(format!(
                "coin field fails certification: det defect {:.3e}, min diagonal {:.3e}",
                cert.max_det_defect, cert.min_diagonal
            )));
        }
        Ok(cert)
    }
}

const DET_TOLERANCE: f64 = 1e-10;
const DIAGONAL_FLOOR: f64 = 1e-10;

/// C(x) with det C = 1 and nonzero diagonal enforced.
pub fn coin_field_eval(coins: &CoinField, x: &Phase) -> Result<Mat2> {
    if x.dim() != coins.dim() {
        return Err(Error::InvalidArgument(format!(
            "phase has d = {} but the coin field has d = {}",
            x.dim(),
            coins.dim()
        )));
    }
    let c = coins.eval_raw(x.coords());
    let defect = (crate::linalg::mat2_det(&c) - ONE).norm();
    if defect > DET_TOLERANCE {
        return Err(Error::ModelViolation(format!(
            "coin at {:?} has |det − 1| = {defect:.3e}",
            x.coords()
        )));
    }
    if c[0][0].norm() <= DIAGONAL_FLOOR || c[1][1].norm() <= DIAGONAL_FLOOR {
        return Err(Error::ModelViolation(format!(
            "coin at {:?} has a vanishing diagonal entry",
            x.coords()
        )));
    }
    Ok(c)
}

/// JSON model file: `{"d": 2, "alpha": {"terms": [...]}, "coins": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<TrigPolySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coins: Option<CoinSpec>,
}
