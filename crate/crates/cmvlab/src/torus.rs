//! Points of the torus 𝕋^d, the shift x ↦ x + ω and finite-range
//! Diophantine checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduces a real number into [0, 1).
///
/// `x − floor(x)` can round up to exactly 1.0 for tiny negative inputs;
/// that case is folded back to 0.
pub fn reduce(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of 𝕋^d with every coordinate in [0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Phase {
    coords: Vec<f64>,
}

impl Phase {
    /// Wraps arbitrary real coordinates onto the torus.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("phase needs d ≥ 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("phase coordinates must be finite".into()));
        }
        Ok(Phase {
            coords: coords.into_iter().map(reduce).collect(),
        })
    }

    pub fn origin(d: usize) -> Self {
        Phase {
            coords: vec![0.0; d.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// x + n·ω, computed with one fused multiply-add per coordinate so that
    /// long orbits carry no accumulated drift.
    pub fn shifted(&self, omega: &Frequency, n: i64) -> Phase {
        debug_assert_eq!(self.dim(), omega.dim());
        let nf = n as f64;
        Phase {
            coords: self
                .coords
                .iter()
                .zip(&omega.coords)
                .map(|(x, w)| reduce(nf.mul_add(*w, *x)))
                .collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for Phase {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Phase::new(v)
    }
}

impl From<Phase> for Vec<f64> {
    fn from(p: Phase) -> Self {
        p.coords
    }
}

/// A frequency vector together with the Diophantine constants (p, q) it is
/// claimed to satisfy: ‖k·ω‖ ≥ p / |k|^q for all nonzero k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    coords: Vec<f64>,
    dioph_p: f64,
    dioph_q: f64,
}

impl Frequency {
    pub fn new(coords: Vec<f64>, dioph_p: f64, dioph_q: f64) -> Result<Self> {
        let d = coords.len();
        if d == 0 {
            return Err(Error::InvalidArgument("frequency needs d ≥ 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("frequency coordinates must be finite".into()));
        }
        if !(dioph_p > 0.0) {
            return Err(Error::InvalidArgument(format!("need p > 0, got {dioph_p}")));
        }
        if !(dioph_q > d as f64) {
            return Err(Error::InvalidArgument(format!(
                "need q > d = {d}, got {dioph_q}"
            )));
        }
        Ok(Frequency {
            coords: coords.into_iter().map(reduce).collect(),
            dioph_p,
            dioph_q,
        })
    }

    /// Frequency with the default exponent q = d + 1 and p = 10⁻³.
    pub fn with_default_condition(coords: Vec<f64>) -> Result<Self> {
        let q = coords.len() as f64 + 1.0;
        Self::new(coords, 1e-3, q)
    }

    /// (√2 − 1, √3 − 1), the default two-dimensional frequency.
    pub fn default_2d() -> Self {
        Self::with_default_condition(vec![2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0])
            .expect("valid constant")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dioph_p(&self) -> f64 {
        self.dioph_p
    }

    pub fn dioph_q(&self) -> f64 {
        self.dioph_q
    }
}

/// The orbit x0 + nω for n = n_from ..= n_to.
pub fn shift_orbit(x0: &Phase, omega: &Frequency, n_from: i64, n_to: i64) -> Result<Vec<Phase>> {
    if n_from > n_to {
        return Err(Error::InvalidArgument(format!(
            "empty orbit range {n_from}..={n_to}"
        )));
    }
    check_dims(x0, omega)?;
    Ok((n_from..=n_to).map(|n| x0.shifted(omega, n)).collect())
}

pub(crate) fn check_dims(x: &Phase, omega: &Frequency) -> Result<()> {
    if x.dim() != omega.dim() {
        return Err(Error::InvalidArgument(format!(
            "phase has d = {} but frequency has d = {}",
            x.dim(),
            omega.dim()
        )));
    }
    Ok(())
}

/// Result of a finite-range Diophantine scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophantineMargin {
    /// min over 0 < |k| ≤ k_max of |k|^q·‖k·ω‖
    pub margin: f64,
    pub worst_k: Vec<i64>,
    /// Norm used for |k|; always the ℓ¹ norm |k₁| + ⋯ + |k_d|.
    pub norm: &'static str,
    /// Whether margin ≥ p on the scanned range.
    pub holds: bool,
}

fn dist_to_integer(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// Scans every nonzero k with |k|₁ ≤ k_max (one of ±k, the one whose first
/// nonzero coordinate is positive) and returns the smallest |k|₁^q·‖k·ω‖.
///
/// Ties keep the first vector in the order (|k|₁, lexicographic), so the
/// reported worst k is deterministic.
pub fn diophantine_margin(omega: &Frequency, k_max: u32) -> Result<DiophantineMargin> {
    if k_max < 1 {
        return Err(Error::InvalidArgument("k_max must be ≥ 1".into()));
    }
    let d = omega.dim();
    let q = omega.dioph_q();
    let mut best = f64::INFINITY;
    let mut best_k = Vec::new();
    let mut k = vec![0i64; d];
    for norm in 1..=k_max as i64 {
        enumerate_shell(&mut k, 0, norm, true, &mut |k| {
            let dot: f64 = k.iter().zip(omega.coords()).map(|(&ki, w)| ki as f64 * w).sum();
            let value = (norm as f64).powf(q) * dist_to_integer(dot);
            if value < best {
                best = value;
                best_k = k.to_vec();
            }
        });
    }
    Ok(DiophantineMargin {
        margin: best,
        worst_k: best_k,
        norm: "l1",
        holds: best >= omega.dioph_p(),
    })
}

/// Visits all k with Σ|k_i| = remaining over coordinates pos.., in
/// lexicographic order. While `leading` is set no nonzero coordinate has
/// been placed yet, and the next nonzero one must be positive.
fn enumerate_shell(
    k: &mut [i64],
    pos: usize,
    remaining: i64,
    leading: bool,
    visit: &mut dyn FnMut(&[i64]),
) {
    if pos == k.len() {
        if remaining == 0 {
            visit(k);
        }
        return;
    }
    if pos == k.len() - 1 {
        let candidates: &[i64] = if remaining == 0 {
            &[0]
        } else if leading {
            &[1]
        } else {
            &[-1, 1]
        };
        for &s in candidates {
            k[pos] = s * remaining;
            visit(k);
        }
        k[pos] = 0;
        return;
    }
    let lo = if leading { 0 } else { -remaining };
    for v in lo..=remaining {
        k[pos] = v;
        enumerate_shell(k, pos + 1, remaining - v.abs(), leading && v == 0, visit);
    }
    k[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_returns_start() {
        let x0 = Phase::new(vec![0.25]).unwrap();
        let w = Frequency::with_default_condition(vec![0.5]).unwrap();
        assert_eq!(shift_orbit(&x0, &w, 0, 0).unwrap(), vec![x0]);
    }

    #[test]
    fn one_step_wraps_around() {
        let x0 = Phase::new(vec![0.9, 0.9]).unwrap();
        let w = Frequency::with_default_condition(vec![0.2, 0.3]).unwrap();
        let orbit = shift_orbit(&x0, &w, 0, 1).unwrap();
        assert!((orbit[1].coords()[0] - 0.1).abs() < 1e-15);
        assert!((orbit[1].coords()[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn tenth_step_of_silver_frequency() {
        let x0 = Phase::new(vec![0.0]).unwrap();
        let w = Frequency::with_default_condition(vec![2f64.sqrt() - 1.0]).unwrap();
        let x = x0.shifted(&w, 10);
        // 10(√2−1) = 4.142135623730950...
        assert!((x.coords()[0] - 0.142_135_623_730_950_5).abs() < 1e-14);
    }

    #[test]
    fn tiny_negative_reduces_into_unit_interval() {
        let r = reduce(-1e-20);
        assert!((0.0..1.0).contains(&r));
    }

    #[test]
    fn rational_frequency_has_zero_margin() {
        let w = Frequency::with_default_condition(vec![0.5]).unwrap();
        let m = diophantine_margin(&w, 2).unwrap();
        assert_eq!(m.margin, 0.0);
        assert_eq!(m.worst_k, vec![2]);
        assert!(!m.holds);
    }

    #[test]
    fn zero_frequency_fails_at_first_vector() {
        let w = Frequency::with_default_condition(vec![0.0]).unwrap();
        let m = diophantine_margin(&w, 7).unwrap();
        assert_eq!(m.margin, 0.0);
        assert_eq!(m.worst_k, vec![1]);
    }

    #[test]
    fn shell_enumeration_counts_half_the_lattice_sphere() {
        // the ℓ¹ sphere of radius r in ℤ² has 4r points, half up to sign
        for r in 1..6 {
            let mut count = 0;
            let mut k = vec![0i64; 2];
            enumerate_shell(&mut k, 0, r, true, &mut |_| count += 1);
            assert_eq!(count, 2 * r);
        }
    }

    #[test]
    fn invalid_condition_rejected() {
        assert!(Frequency::new(vec![0.1, 0.2], 0.1, 2.0).is_err());
        assert!(Frequency::new(vec![0.1], 0.0, 3.0).is_err());
    }
}
