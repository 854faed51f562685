//! Lyapunov exponents of the Szegő cocycle: phase-averaged and single-orbit
//! estimates, large-deviation measurements, the avalanche-principle
//! checker and the finite-n convergence table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{szego_log_norm, SpectralPoint};
use crate::error::{Error, Result};
use crate::linalg::{mat2_det, mat2_mul, mat2_op_norm, Mat2};
use crate::model::SamplingFunction;
use crate::torus::{check_dims, Frequency, Phase};

/// The `index`-th uniformly distributed phase of the stream keyed by `seed`.
///
/// Each index owns its own ChaCha stream, so the value does not depend on
/// which thread draws it or in which order.
pub fn sample_phase(dim: usize, seed: u64, index: u64) -> Phase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let coords = (0..dim).map(|_| rng.random::<f64>()).collect();
    Phase::new(coords).expect("uniform samples are finite")
}

/// Pairwise (cascade) summation in fixed index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// log‖M_n(x_i)‖ at the sampled phases x_i, i = 0..samples, in index order.
pub fn sampled_log_norms(
    alpha: &SamplingFunction,
    omega: &Frequency,
    z: &SpectralPoint,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let d = alpha.dim();
    if omega.dim() != d {
        return Err(Error::InvalidArgument(format!(
            "frequency has d = {} but the model has d = {d}",
            omega.dim()
        )));
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| szego_log_norm(alpha, &sample_phase(d, seed, i), omega, z, n))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub n: usize,
    pub z: SpectralPoint,
    /// estimate of L_n in nats per step
    pub mean: f64,
    pub stderr: f64,
    pub sample_count: usize,
    pub seed: u64,
}

/// L_n(z) = ∫ (1/n) log‖M_n(x)‖ dx estimated from `samples` phases.
pub fn finite_lyapunov(
    alpha: &SamplingFunction,
    omega: &Frequency,
    z: &SpectralPoint,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidArgument("need n ≥ 1 and samples ≥ 1".into()));
    }
    let per_step: Vec<f64> = sampled_log_norms(alpha, omega, z, n, samples, seed)?
        .into_iter()
        .map(|v| v / n as f64)
        .collect();
    let (mean, stderr) = mean_and_stderr(&per_step);
    Ok(LyapunovEstimate {
        n,
        z: *z,
        mean,
        stderr,
        sample_count: samples,
        seed,
    })
}

/// (1/n) log‖M_n(x0)‖ along one orbit.
pub fn birkhoff_lyapunov(
    alpha: &SamplingFunction,
    omega: &Frequency,
    z: &SpectralPoint,
    x0: &Phase,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("need n ≥ 1".into()));
    }
    check_dims(x0, omega)?;
    Ok(szego_log_norm(alpha, x0, omega, z, n)? / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdtReport {
    pub n: usize,
    pub tau: f64,
    /// n^{1−τ}
    pub deviation_threshold: f64,
    /// fraction of sampled phases with |log‖M_n‖ − nL_n| > n^{1−τ}
    pub measure_estimate: f64,
    pub exceptional_count: usize,
    pub sample_count: usize,
    /// the L_n the deviations were measured against
    pub l_n: f64,
}

/// Empirical measure of the large-deviation set at scale n.
///
/// When `l_n` is not supplied it is the mean over the same sampled phases.
pub fn ldt_measure(
    alpha: &SamplingFunction,
    omega: &Frequency,
    z: &SpectralPoint,
    n: usize,
    tau: f64,
    samples: usize,
    seed: u64,
    l_n: Option<f64>,
) -> Result<LdtReport> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidArgument(format!("τ must lie in (0,1), got {tau}")));
    }
    if n == 0 || samples == 0 {
        return Err(Error::InvalidArgument("need n ≥ 1 and samples ≥ 1".into()));
    }
    let logs = sampled_log_norms(alpha, omega, z, n, samples, seed)?;
    let l_n = l_n.unwrap_or_else(|| pairwise_sum(&logs) / (samples * n) as f64);
    let threshold = (n as f64).powf(1.0 - tau);
    let center = n as f64 * l_n;
    let count = logs.iter().filter(|&&v| (v - center).abs() > threshold).count();
    Ok(LdtReport {
        n,
        tau,
        deviation_threshold: threshold,
        measure_estimate: count as f64 / samples as f64,
        exceptional_count: count,
        sample_count: samples,
        l_n,
    })
}

/// Fit of measure(n) ≈ exp(−C₀ n^σ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdtFit {
    pub c0: f64,
    pub sigma: f64,
    pub points: usize,
}

/// Least squares of log(−log measure) against log n over the reports with
/// 0 < measure < 1. None with fewer than two usable points.
pub fn ldt_fit(reports: &[LdtReport]) -> Option<LdtFit> {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.measure_estimate > 0.0 && r.measure_estimate < 1.0)
        .map(|r| ((r.n as f64).ln(), (-r.measure_estimate.ln()).ln()))
        .collect();
    let (slope, intercept) = linear_fit(&pts)?;
    Some(LdtFit {
        c0: intercept.exp(),
        sigma: slope,
        points: pts.len(),
    })
}

/// Ordinary least squares y = slope·x + intercept.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// A phase predicate: x lies in the large-deviation set at scale n.
#[derive(Debug, Clone)]
pub struct LdtExceptionalSet {
    pub alpha: SamplingFunction,
    pub omega: Frequency,
    pub z: SpectralPoint,
    pub n: usize,
    pub tau: f64,
    pub l_n: f64,
}

impl LdtExceptionalSet {
    pub fn contains(&self, x: &Phase) -> bool {
        match szego_log_norm(&self.alpha, x, &self.omega, &self.z, self.n) {
            Ok(v) => (v - self.n as f64 * self.l_n).abs() > (self.n as f64).powf(1.0 - self.tau),
            Err(_) => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApReport {
    pub m: usize,
    pub mu: f64,
    /// min‖A_j‖ ≥ μ ≥ m
    pub hyp1_ok: bool,
    /// max_j log‖A_{j+1}‖ + log‖A_j‖ − log‖A_{j+1}A_j‖ < ½ log μ
    pub hyp2_ok: bool,
    pub residual: f64,
    /// C_A·m/μ
    pub bound: f64,
    pub c_a: f64,
    /// whether residual ≤ bound, only claimed when both hypotheses hold
    pub within_bound: Option<bool>,
}

/// Default avalanche constant.
pub const DEFAULT_C_A: f64 = 10.0;

/// Evaluates the avalanche principle on A_1, …, A_m.
pub fn ap_check(matrices: &[Mat2], mu: f64, c_a: f64) -> Result<ApReport> {
    let m = matrices.len();
    if m < 2 {
        return Err(Error::InvalidArgument("the avalanche principle needs m ≥ 2".into()));
    }
    let norms: Vec<f64> = matrices.iter().map(mat2_op_norm).collect();
    for (j, (a, nrm)) in matrices.iter().zip(&norms).enumerate() {
        // det of a matrix with norm ‖A‖ carries rounding of order ε‖A‖²
        let det_abs = mat2_det(a).norm();
        if (det_abs - 1.0).abs() > 1e-8 + 8.0 * f64::EPSILON * nrm * nrm {
            return Err(Error::NotUnimodular { index: j, det_abs });
        }
    }
    let logs: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let pair_logs: Vec<f64> = matrices
        .windows(2)
        .map(|w| mat2_op_norm(&mat2_mul(&w[1], &w[0])).ln())
        .collect();
    let mut full = crate::cocycle::ScaledMat2::identity();
    for a in matrices {
        full.left_apply(a);
    }
    let middle: f64 = logs[1..m - 1].iter().sum();
    let pairs: f64 = pair_logs.iter().sum();
    let residual = (full.log_norm() + middle - pairs).abs();

    let min_norm = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let hyp1_ok = min_norm >= mu && mu >= m as f64;
    let max_defect = (0..m - 1)
        .map(|j| logs[j + 1] + logs[j] - pair_logs[j])
        .fold(f64::NEG_INFINITY, f64::max);
    let hyp2_ok = max_defect < 0.5 * mu.ln();
    let bound = c_a * m as f64 / mu;
    Ok(ApReport {
        m,
        mu,
        hyp1_ok,
        hyp2_ok,
        residual,
        bound,
        c_a,
        within_bound: (hyp1_ok && hyp2_ok).then_some(residual <= bound),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub l_n: f64,
    pub stderr: f64,
    /// L_n − L_ref
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    pub l_ref: f64,
    pub sigma: f64,
    /// C in L_n − L_ref ≈ C·(log n)^{1/σ}/n, least squares through the origin
    pub fit_constant: Option<f64>,
    /// L_{2n} ≤ L_n + 3·stderr on every doubling pair of the table, with the
    /// standard error of the difference
    pub monotone_ok: bool,
}

/// L_n over an increasing list of scales, compared with a reference value.
pub fn rate_table(
    alpha: &SamplingFunction,
    omega: &Frequency,
    z: &SpectralPoint,
    n_list: &[usize],
    samples: usize,
    seed: u64,
    l_ref: Option<f64>,
    sigma: f64,
) -> Result<RateTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("n_list must be nonempty and increasing".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument("σ must be positive".into()));
    }
    let estimates = n_list
        .iter()
        .map(|&n| finite_lyapunov(alpha, omega, z, n, samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let l_ref = l_ref.unwrap_or_else(|| estimates.last().expect("nonempty").mean);
    let rows: Vec<RateRow> = estimates
        .iter()
        .map(|e| RateRow {
            n: e.n,
            l_n: e.mean,
            stderr: e.stderr,
            diff: e.mean - l_ref,
        })
        .collect();
    let basis = |n: usize| (n as f64).ln().powf(1.0 / sigma) / n as f64;
    let (sfd, sff) = rows.iter().fold((0.0, 0.0), |(a, b), r| {
        let f = basis(r.n);
        (a + f * r.diff, b + f * f)
    });
    let fit_constant = (sff > 0.0).then(|| sfd / sff);
    let monotone_ok = rows
        .iter()
        .flat_map(|a| rows.iter().filter(move |b| b.n == 2 * a.n).map(move |b| (a, b)))
        .all(|(a, b)| b.l_n <= a.l_n + 3.0 * a.stderr.hypot(b.stderr));
    Ok(RateTable {
        rows,
        l_ref,
        sigma,
        fit_constant,
        monotone_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn phase_samples_are_order_independent() {
        let a: Vec<Phase> = (0..5).map(|i| sample_phase(2, 7, i)).collect();
        let b: Vec<Phase> = (0..5).rev().map(|i| sample_phase(2, 7, i)).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
        assert_ne!(sample_phase(2, 7, 0), sample_phase(2, 8, 0));
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }

    #[test]
    fn free_cocycle_has_vanishing_exponent() {
        let a = SamplingFunction::zero(2);
        let est = finite_lyapunov(&a, &Frequency::default_2d(), &SpectralPoint::new(1.0), 50, 20, 0).unwrap();
        assert!(est.mean.abs() < 1e-14);
    }

    #[test]
    fn constant_cocycle_single_sample() {
        let a = SamplingFunction::constant(2, Complex64::new(0.5, 0.0)).unwrap();
        let est = finite_lyapunov(&a, &Frequency::default_2d(), &SpectralPoint::new(0.0), 200, 1, 0).unwrap();
        assert!((est.mean - 0.549_306).abs() < 0.005);
    }

    #[test]
    fn birkhoff_constant_cocycle() {
        let a = SamplingFunction::constant(2, Complex64::new(0.5, 0.0)).unwrap();
        let v = birkhoff_lyapunov(&a, &Frequency::default_2d(), &SpectralPoint::new(0.0), &Phase::origin(2), 10_000)
            .unwrap();
        assert!((v - 0.549_306).abs() < 1e-3);
    }

    #[test]
    fn ldt_of_free_cocycle_is_zero() {
        let a = SamplingFunction::zero(2);
        for n in [10, 50] {
            let r = ldt_measure(&a, &Frequency::default_2d(), &SpectralPoint::new(2.0), n, 0.3, 50, 1, None).unwrap();
            assert_eq!(r.measure_estimate, 0.0);
        }
    }

    #[test]
    fn telescoping_diagonal_chain() {
        let d = |s: f64| [[Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0 / s, 0.0)]];
        let chain = vec![d(100.0); 5];
        let r = ap_check(&chain, 100.0, DEFAULT_C_A).unwrap();
        assert!(r.residual < 1e-10);
        assert!(r.hyp1_ok && r.hyp2_ok);
        assert_eq!(r.within_bound, Some(true));
    }

    #[test]
    fn rotated_block_breaks_second_hypothesis() {
        let mu = 50.0;
        let d = [[Complex64::new(mu, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0 / mu, 0.0)]];
        let t = std::f64::consts::FRAC_PI_2 - 1e-3;
        let (s, c) = t.sin_cos();
        let r = [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]];
        let rt = [[r[0][0], r[1][0]], [r[0][1], r[1][1]]];
        let conj = mat2_mul(&r, &mat2_mul(&d, &rt));
        let rep = ap_check(&[d, conj, d], mu, DEFAULT_C_A).unwrap();
        assert!(!rep.hyp2_ok);
        assert_eq!(rep.within_bound, None);
    }

    #[test]
    fn non_unimodular_is_rejected() {
        let m = [[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
        assert!(matches!(ap_check(&[m, m], 2.0, 10.0), Err(Error::NotUnimodular { index: 0, .. })));
    }

    #[test]
    fn ldt_fit_recovers_planted_law() {
        let reports: Vec<LdtReport> = [50usize, 100, 200]
            .iter()
            .map(|&n| LdtReport {
                n,
                tau: 0.3,
                deviation_threshold: 0.0,
                measure_estimate: (-0.2 * (n as f64).powf(0.5)).exp(),
                exceptional_count: 0,
                sample_count: 0,
                l_n: 0.0,
            })
            .collect();
        let f = ldt_fit(&reports).unwrap();
        assert!((f.sigma - 0.5).abs() < 1e-12 && (f.c0 - 0.2).abs() < 1e-12);
    }
}
