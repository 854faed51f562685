//! Eigenphases and eigenvectors of finite CMV truncations, localization
//! fits, resonance gaps along the orbit and orbit-visit counting.
//!
//! Eigenphases come from a root scan of a real function on the circle.
//! Writing the spectrum as e^{iθ_k},
//!
//!   φ(e^{iθ}) = (2i)^n e^{inθ/2} e^{iΣθ_k/2} Π sin((θ − θ_k)/2),
//!
//! so h(θ) = φ(e^{iθ})·e^{−inθ/2} / (i^n e^{iΣθ_k/2}) = Π 2 sin((θ − θ_k)/2)
//! is real and has a simple sign change at every simple eigenphase. The
//! factor e^{iΣθ_k} is det E, known from φ(0) without the spectrum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cmvop::FiniteCMV;
use crate::cocycle::SpectralPoint;
use crate::error::{Error, Result};
use crate::lyapunov::linear_fit;
use crate::model::SamplingFunction;
use crate::torus::{Frequency, Phase};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const TWO_PI: f64 = 2.0 * PI;

/// Regularizing shift z(1 + δ) of the inverse iteration.
const INVERSE_ITERATION_SHIFT: f64 = 1e-9;
const MAX_INVERSE_ITERATIONS: usize = 50;
/// Accepted ‖Ev − zv‖ for an eigenpair.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Eigenphases closer than this are treated as one cluster whose vectors
/// are orthogonalized against each other.
const CLUSTER_SEPARATION: f64 = 1e-6;

fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TWO_PI);
    if t >= TWO_PI {
        0.0
    } else {
        t
    }
}

/// The real function h(θ) of the module docs.
struct PhaseFunction<'a> {
    op: &'a FiniteCMV,
    /// conj(e^{iΣθ_k/2})·(−i)^n
    factor: Complex64,
}

impl<'a> PhaseFunction<'a> {
    fn new(op: &'a FiniteCMV) -> Self {
        let n = op.dim();
        // φ(0) = det(−E) = (−1)^n det E
        let phi0 = op.char_det_banded(ZERO).mantissa;
        let det_e = if n % 2 == 0 { phi0 } else { -phi0 };
        let half = Complex64::from_polar(1.0, det_e.arg() / 2.0);
        let minus_i_pow = match n % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
        PhaseFunction {
            op,
            factor: half.conj() * minus_i_pow,
        }
    }

    fn eval(&self, theta: f64) -> f64 {
        let n = self.op.dim() as f64;
        let phi = self.op.char_det_banded(Complex64::cis(theta));
        phi.mul(Complex64::cis(-n * theta / 2.0) * self.factor).value().re
    }

    /// Bisection for a sign change of h on [lo, hi].
    fn bisect(&self, mut lo: f64, mut hi: f64, mut h_lo: f64) -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let h_mid = self.eval(mid);
            if h_mid == 0.0 {
                return mid;
            }
            if (h_mid < 0.0) == (h_lo < 0.0) {
                lo = mid;
                h_lo = h_mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Golden-section minimization of sign·h on [lo, hi].
    fn golden_min(&self, mut lo: f64, mut hi: f64, sign: f64) -> (f64, f64) {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = sign * self.eval(x1);
        let mut f2 = sign * self.eval(x2);
        for _ in 0..100 {
            if hi - lo < 1e-13 || f1 < 0.0 || f2 < 0.0 {
                break;
            }
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = sign * self.eval(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = sign * self.eval(x2);
            }
        }
        if f1 < f2 {
            (x1, f1)
        } else {
            (x2, f2)
        }
    }
}

/// All eigenphases θ ∈ [0, 2π) of the truncation, sorted, repeated by
/// multiplicity.
///
/// The scan samples h on `grid_size` equally spaced angles, bisects every
/// sign change and examines every grid minimum of |h| that shows no sign
/// change: a golden-section search either crosses zero there (two close
/// roots, both bisected) or finds a minimum below 1e−9·n, which counts as
/// a double root.
pub fn eigenphases(op: &FiniteCMV, grid_size: usize) -> Result<Vec<f64>> {
    let n = op.dim();
    if grid_size < 8 * n {
        return Err(Error::InvalidArgument(format!(
            "grid of {grid_size} points is below 8·dimension = {}",
            8 * n
        )));
    }
    if n == 1 {
        return Ok(vec![reduce_angle(op.e_band().get(0, 0).arg())]);
    }
    let h = PhaseFunction::new(op);
    let step = TWO_PI / grid_size as f64;
    // start where h is not tiny so that no root sits on the seam
    let mut start = 0.0;
    for k in 1..8 {
        if h.eval(start).abs() > 1e-6 {
            break;
        }
        start = step * k as f64 / 8.0;
    }
    // angles start + i·step for i = −1 ..= grid_size + 1
    let thetas: Vec<f64> = (0..grid_size + 3)
        .map(|i| start + (i as f64 - 1.0) * step)
        .collect();
    let values: Vec<f64> = thetas.par_iter().map(|&t| h.eval(t)).collect();
    let tol = 1e-9 * n as f64;
    let mut roots = Vec::with_capacity(n);
    for i in 1..=grid_size {
        let (t, v, v_next) = (thetas[i], values[i], values[i + 1]);
        if v == 0.0 {
            roots.push(t);
            continue;
        }
        if v * v_next < 0.0 {
            roots.push(h.bisect(t, thetas[i + 1], v));
            continue;
        }
        let v_prev = values[i - 1];
        let sign = v.signum();
        let same_sign = v_prev * sign > 0.0 && v_next * sign > 0.0;
        if !(same_sign && sign * v <= sign * v_prev && sign * v <= sign * v_next) {
            continue;
        }
        let (t_min, f_min) = h.golden_min(thetas[i - 1], thetas[i + 1], sign);
        if f_min < 0.0 {
            roots.push(h.bisect(thetas[i - 1], t_min, v_prev));
            roots.push(h.bisect(t_min, thetas[i + 1], sign * f_min));
        } else if f_min < tol {
            roots.push(t_min);
            roots.push(t_min);
        }
    }
    let mut roots: Vec<f64> = roots.into_iter().map(reduce_angle).collect();
    roots.sort_by(f64::total_cmp);
    if roots.len() != n {
        return Err(Error::MissedEigenvalue {
            found: roots.len(),
            expected: n,
        });
    }
    Ok(roots)
}

/// [`eigenphases`] starting from a grid of 8·dimension points and
/// doubling it up to four times when eigenphases are missed.
pub fn eigenphases_auto(op: &FiniteCMV) -> Result<Vec<f64>> {
    let mut grid = 8 * op.dim();
    let mut last = None;
    for _ in 0..5 {
        match eigenphases(op, grid) {
            Err(e @ Error::MissedEigenvalue { .. }) => last = Some(e),
            other => return other,
        }
        grid *= 2;
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub theta: f64,
    /// site of `vector[0]`
    pub first_site: i64,
    /// unit vector, phase fixed so that its largest entry is real positive
    pub vector: Vec<Complex64>,
    /// ‖E v − z v‖
    pub residual: f64,
    /// ‖(z L* − M) v‖
    pub factored_residual: f64,
}

impl EigenPair {
    pub fn z(&self) -> Complex64 {
        Complex64::cis(self.theta)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn orthogonalize(v: &mut [Complex64], against: &[Vec<Complex64>]) {
    for u in against {
        let c = dot(u, v);
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= c * ui;
        }
    }
}

fn residual_of(op: &FiniteCMV, v: &[Complex64], z: Complex64) -> f64 {
    let ev = op.apply(v);
    ev.iter()
        .zip(v)
        .map(|(e, x)| (e - z * x).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigenvector at an eigenphase known to within 1e−6, by inverse iteration
/// on z(1+δ)L* − M with δ = 1e−9.
///
/// Since zL* − M = L*(z − E), each step solves (zL* − M)w = L*v, which is
/// w = (z − E)^{−1}v.
///
/// After the first solve the eigenvalue is refined by the Rayleigh
/// quotient ⟨v, Ev⟩ (projected to the circle), which for a unitary matrix
/// is accurate to the square of the residual; the returned θ is this
/// refined value.
pub fn eigenvector_inverse_iteration(op: &FiniteCMV, theta: f64) -> Result<EigenPair> {
    inverse_iteration(op, theta, &[])
}

fn inverse_iteration(op: &FiniteCMV, theta: f64, deflate: &[Vec<Complex64>]) -> Result<EigenPair> {
    let n = op.dim();
    let mut z = Complex64::cis(theta);
    // a fixed start vector with no special alignment to any eigenvector
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut v: Vec<Complex64> = (0..n)
        .map(|k| Complex64::cis(TWO_PI * golden * (k * k + 1) as f64) * (1.0 + 0.1 * (k % 3) as f64))
        .collect();
    orthogonalize(&mut v, deflate);
    let l_adjoint = op.l_band().adjoint();
    let mut best: Option<(f64, Complex64, Vec<Complex64>)> = None;
    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let lu = op.pencil(z * (1.0 + INVERSE_ITERATION_SHIFT)).lu();
        let mut w = l_adjoint.mul_vec(&v);
        lu.solve_in_place(&mut w);
        orthogonalize(&mut w, deflate);
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            break;
        }
        for x in w.iter_mut() {
            *x /= nw;
        }
        let rq = dot(&w, &op.apply(&w));
        if rq.norm() > 0.0 {
            z = rq / rq.norm();
        }
        let residual = residual_of(op, &w, z);
        last_residual = residual;
        if best.as_ref().map_or(true, |b| residual < b.0) {
            best = Some((residual, z, w.clone()));
        }
        v = w;
        if residual < 1e-13 {
            break;
        }
    }
    match best {
        Some((residual, z, mut vector)) if residual < EIGEN_RESIDUAL_TOLERANCE => {
            let (imax, _) = vector
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, c)| if c.norm() > acc.1 { (i, c.norm()) } else { acc });
            let phase = vector[imax].conj() / vector[imax].norm();
            for x in vector.iter_mut() {
                *x *= phase;
            }
            let factored_residual = op.factored_residual(z, &vector);
            Ok(EigenPair {
                theta: reduce_angle(z.arg()),
                first_site: op.a(),
                vector,
                residual,
                factored_residual,
            })
        }
        _ => Err(Error::NoConvergence {
            iterations: MAX_INVERSE_ITERATIONS,
            residual: last_residual,
        }),
    }
}

/// Every eigenpair of the truncation. Vectors inside a cluster of
/// eigenphases closer than 1e−6 are orthogonalized against each other.
pub fn eigenpairs(op: &FiniteCMV) -> Result<Vec<EigenPair>> {
    let thetas = eigenphases_auto(op)?;
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(thetas.len());
    let mut cluster: Vec<Vec<Complex64>> = Vec::new();
    let mut prev: Option<f64> = None;
    for &t in &thetas {
        if prev.map_or(true, |p| (Complex64::cis(t) - Complex64::cis(p)).norm() > CLUSTER_SEPARATION) {
            cluster.clear();
        }
        let pair = inverse_iteration(op, t, &cluster)?;
        cluster.push(pair.vector.clone());
        pairs.push(pair);
        prev = Some(t);
    }
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationFit {
    /// site of the largest entry
    pub center: i64,
    /// fitted decay rate of |v(k)| in nats per site
    pub rate: f64,
    /// coefficient of determination of the fit
    pub fit_quality: f64,
    /// ℓ² mass on the sites used by the fit
    pub tail_fraction: f64,
    pub points: usize,
}

/// Least-squares fit of log|v(k)| against −rate·|k − center| over the sites
/// at distance ≥ len/8 from the center where |v(k)| > 1e−14.
///
/// The two sides of the center share the rate but get their own intercept:
/// a localized vector is generally lopsided, and the offset between its
/// flanks says nothing about decay. The quality is the share of the
/// within-side variance of log|v| that the common slope explains.
pub fn localization_fit(pair: &EigenPair) -> Result<LocalizationFit> {
    localization_fit_values(&pair.vector, pair.first_site)
}

/// [`localization_fit`] for a bare vector whose first entry sits at
/// `first_site`.
pub fn localization_fit_values(v: &[Complex64], first_site: i64) -> Result<LocalizationFit> {
    if v.len() < 32 {
        return Err(Error::InvalidArgument(format!(
            "localization fit needs at least 32 sites, got {}",
            v.len()
        )));
    }
    let (center, _) = v
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, c)| if c.norm() > acc.1 { (i, c.norm()) } else { acc });
    let min_dist = v.len() as f64 / 8.0;
    let total: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    // (distance, log|v|) per side
    let mut sides: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    let mut tail = 0.0;
    for (k, c) in v.iter().enumerate() {
        let dist = (k as f64 - center as f64).abs();
        if dist >= min_dist {
            tail += c.norm_sqr();
            if c.norm() > 1e-14 {
                sides[usize::from(k > center)].push((dist, c.norm().ln()));
            }
        }
    }
    let points = sides[0].len() + sides[1].len();
    let degenerate = LocalizationFit {
        center: first_site + center as i64,
        rate: 0.0,
        fit_quality: 0.0,
        tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
        points,
    };
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for side in sides.iter().filter(|s| !s.is_empty()) {
        let m = side.len() as f64;
        let mx = side.iter().map(|p| p.0).sum::<f64>() / m;
        let my = side.iter().map(|p| p.1).sum::<f64>() / m;
        for &(x, y) in side {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
            syy += (y - my) * (y - my);
        }
    }
    // a flat profile carries no decay information
    if points < 3 || sxx == 0.0 || syy <= 1e-20 * points as f64 {
        return Ok(degenerate);
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return Ok(degenerate);
    }
    Ok(LocalizationFit {
        rate: -slope,
        fit_quality: (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0),
        ..degenerate
    })
}

/// Indices of the `count` eigenpairs whose vectors peak in the middle half
/// of the interval and whose eigenvalues lie farthest (chordally) from
/// their spectral neighbours, returned with that isolation and sorted by θ.
///
/// Nearly degenerate pairs are tunneling-split resonances whose vectors
/// have two humps; isolation filters them out.
pub fn isolated_central_eigenpairs(pairs: &[EigenPair], count: usize) -> Vec<(usize, f64)> {
    let n = pairs.len();
    if n < 3 {
        return Vec::new();
    }
    let mut candidates: Vec<(usize, f64)> = (0..n)
        .filter(|&i| {
            let v = &pairs[i].vector;
            let (peak, _) = v
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (k, c)| if c.norm() > acc.1 { (k, c.norm()) } else { acc });
            4 * peak >= v.len() && 4 * peak <= 3 * v.len()
        })
        .map(|i| {
            let z = pairs[i].z();
            let prev = pairs[(i + n - 1) % n].z();
            let next = pairs[(i + 1) % n].z();
            (i, (z - prev).norm().min((z - next).norm()))
        })
        .collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    candidates.truncate(count);
    candidates.sort_by(|a, b| pairs[a.0].theta.total_cmp(&pairs[b.0].theta));
    candidates
}

/// Which half-widths j are scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Subsampling {
    /// j ∈ {1, 2, 4, …} together with n1 itself
    #[default]
    Geometric,
    /// every j = 1 ..= n1
    Full,
}

/// Which interval belongs to the half-width j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IntervalConvention {
    /// [−j, j]
    #[default]
    Symmetric,
    /// [−j+1, j−1]
    Inner,
}

impl IntervalConvention {
    pub fn interval(self, j: i64) -> (i64, i64) {
        match self {
            IntervalConvention::Symmetric => (-j, j),
            IntervalConvention::Inner => (-j + 1, j - 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceReport {
    pub x0: Phase,
    pub z: SpectralPoint,
    pub n1: usize,
    /// min over scanned j of the chordal distance from z to the spectrum
    pub gap: f64,
    pub argmin_j: i64,
    /// (j, gap_j) for every scanned j
    pub ladder: Vec<(i64, f64)>,
    pub subsampling: Subsampling,
    pub convention: IntervalConvention,
}

/// Half-widths scanned by [`double_resonance_gap`].
pub fn resonance_ladder(n1: usize, subsampling: Subsampling) -> Vec<i64> {
    match subsampling {
        Subsampling::Full => (1..=n1 as i64).collect(),
        Subsampling::Geometric => {
            let mut js = Vec::new();
            let mut j = 1;
            while j <= n1 {
                js.push(j as i64);
                j *= 2;
            }
            if js.last() != Some(&(n1 as i64)) {
                js.push(n1 as i64);
            }
            js
        }
    }
}

/// Chordal distance from z to the spectrum of the truncations of x0 along
/// the ladder of half-widths, and its minimum.
#[allow(clippy::too_many_arguments)]
pub fn double_resonance_gap(
    alpha: &SamplingFunction,
    omega: &Frequency,
    x0: &Phase,
    z: &SpectralPoint,
    n1: usize,
    beta: Complex64,
    eta: Complex64,
    subsampling: Subsampling,
    convention: IntervalConvention,
) -> Result<ResonanceReport> {
    if n1 < 1 {
        return Err(Error::InvalidArgument("resonance scan needs n1 ≥ 1".into()));
    }
    let js = resonance_ladder(n1, subsampling);
    let ladder: Vec<(i64, f64)> = js
        .par_iter()
        .map(|&j| {
            let (a, b) = convention.interval(j);
            let op = FiniteCMV::from_model(alpha, x0, omega, a, b, beta, eta)?;
            let gap = eigenphases_auto(&op)?
                .iter()
                .map(|&t| (z.z() - Complex64::cis(t)).norm())
                .fold(f64::INFINITY, f64::min);
            Ok((j, gap))
        })
        .collect::<Result<_>>()?;
    let (argmin_j, gap) = ladder
        .iter()
        .copied()
        .fold((0, f64::INFINITY), |acc, (j, g)| if g < acc.1 { (j, g) } else { acc });
    Ok(ResonanceReport {
        x0: x0.clone(),
        z: *z,
        n1,
        gap,
        argmin_j,
        ladder,
        subsampling,
        convention,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisitCount {
    pub n: u64,
    pub count: u64,
    pub fraction: f64,
}

/// Number of k = 1..=N with x0 + kω in the set described by `indicator`.
pub fn orbit_visit_count<F>(indicator: F, x0: &Phase, omega: &Frequency, n: u64) -> Result<VisitCount>
where
    F: Fn(&Phase) -> bool + Sync,
{
    if n < 1 {
        return Err(Error::InvalidArgument("visit count needs N ≥ 1".into()));
    }
    crate::torus::check_dims(x0, omega)?;
    let count = (1..=n)
        .into_par_iter()
        .filter(|&k| indicator(&x0.shifted(omega, k as i64)))
        .count() as u64;
    Ok(VisitCount {
        n,
        count,
        fraction: count as f64 / n as f64,
    })
}

/// Slope of log(count) against log(N); None when fewer than two rows have
/// a positive count.
pub fn visit_exponent(rows: &[VisitCount]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.count > 0)
        .map(|r| ((r.n as f64).ln(), (r.count as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    linear_fit(&pts).map(|(slope, _)| slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_site_phase() {
        let u = Complex64::cis(2.0);
        // E = −β·η̄ on one site for even a
        let op = FiniteCMV::new(0, 0, &[], -u, Complex64::new(1.0, 0.0)).unwrap();
        let t = eigenphases(&op, 8).unwrap();
        assert_eq!(t.len(), 1);
        assert!((Complex64::cis(t[0]) - op.e_band().get(0, 0)).norm() < 1e-15);
        let p = eigenvector_inverse_iteration(&op, t[0]).unwrap();
        assert_eq!(p.vector.len(), 1);
        assert!(p.residual < 1e-12);
    }

    #[test]
    fn grid_must_be_fine_enough() {
        let op = FiniteCMV::new(0, 3, &[c(0.1, 0.0); 3], c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(eigenphases(&op, 16), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn planted_exponential() {
        let v: Vec<Complex64> = (0..64).map(|k| c((-0.5 * (k as f64 - 10.0).abs()).exp(), 0.0)).collect();
        let f = localization_fit_values(&v, 0).unwrap();
        assert_eq!(f.center, 10);
        assert!((f.rate - 0.5).abs() < 1e-6);
        assert!(f.fit_quality > 0.999_999);
    }

    #[test]
    fn uniform_vector_has_no_rate() {
        let v = vec![c(0.125, 0.0); 64];
        let f = localization_fit_values(&v, 0).unwrap();
        assert_eq!(f.rate, 0.0);
        assert_eq!(f.fit_quality, 0.0);
    }

    #[test]
    fn trivial_indicators() {
        let x = Phase::origin(2);
        let w = Frequency::default_2d();
        assert_eq!(orbit_visit_count(|_| false, &x, &w, 1000).unwrap().count, 0);
        assert_eq!(orbit_visit_count(|_| true, &x, &w, 1000).unwrap().count, 1000);
    }

    #[test]
    fn geometric_ladder_ends_at_n1() {
        assert_eq!(resonance_ladder(10, Subsampling::Geometric), vec![1, 2, 4, 8, 10]);
        assert_eq!(resonance_ladder(8, Subsampling::Geometric), vec![1, 2, 4, 8]);
        assert_eq!(resonance_ladder(3, Subsampling::Full), vec![1, 2, 3]);
    }

    #[test]
    fn resonance_at_own_eigenphase() {
        let a = SamplingFunction::harmonic(c(0.5, 0.0), vec![1]).unwrap();
        let w = Frequency::with_default_condition(vec![2f64.sqrt() - 1.0]).unwrap();
        let x = Phase::new(vec![0.2]).unwrap();
        let one = c(1.0, 0.0);
        let op = FiniteCMV::from_model(&a, &x, &w, -1, 1, one, one).unwrap();
        let t = eigenphases_auto(&op).unwrap()[1];
        let r = double_resonance_gap(
            &a,
            &w,
            &x,
            &SpectralPoint::new(t),
            1,
            one,
            one,
            Subsampling::Geometric,
            IntervalConvention::Symmetric,
        )
        .unwrap();
        assert!(r.gap < 1e-12);
        assert_eq!(r.argmin_j, 1);
    }
}
