//! Small linear-algebra kernels: 2×2 complex matrices, dense LU for the
//! validation paths and banded LU for the production paths.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn mat2_identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat2_det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn mat2_scale(a: &Mat2, s: f64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat2_max_abs(a: &Mat2) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.norm()))
}

/// Operator 2-norm, the largest singular value.
///
/// With A*A = [[p, q], [q̄, r]] the largest eigenvalue is written as
/// (p+r)/2 + sqrt(((p−r)/2)² + |q|²), which never subtracts nearly equal
/// quantities.
pub fn mat2_op_norm(a: &Mat2) -> f64 {
    let p = a[0][0].norm_sqr() + a[1][0].norm_sqr();
    let r = a[0][1].norm_sqr() + a[1][1].norm_sqr();
    let q = a[0][0].conj() * a[0][1] + a[1][0].conj() * a[1][1];
    let half_diff = 0.5 * (p - r);
    let lmax = 0.5 * (p + r) + (half_diff * half_diff + q.norm_sqr()).sqrt();
    lmax.sqrt()
}

pub fn mat2_frobenius_dist(a: &Mat2, b: &Mat2) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

/// A complex number stored as `mantissa · e^{log_scale}` so that long
/// products (determinants of large matrices) neither overflow nor underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledComplex {
    pub fn one() -> Self {
        ScaledComplex {
            mantissa: ONE,
            log_scale: 0.0,
        }
    }

    pub fn from_complex(v: Complex64) -> Self {
        let mut s = ScaledComplex {
            mantissa: v,
            log_scale: 0.0,
        };
        s.renormalize();
        s
    }

    pub fn mul(self, v: Complex64) -> Self {
        let mut s = ScaledComplex {
            mantissa: self.mantissa * v,
            log_scale: self.log_scale,
        };
        s.renormalize();
        s
    }

    pub fn mul_scaled(self, other: ScaledComplex) -> Self {
        let mut s = ScaledComplex {
            mantissa: self.mantissa * other.mantissa,
            log_scale: self.log_scale + other.log_scale,
        };
        s.renormalize();
        s
    }

    pub fn div_scaled(self, other: ScaledComplex) -> Self {
        let mut s = ScaledComplex {
            mantissa: self.mantissa / other.mantissa,
            log_scale: self.log_scale - other.log_scale,
        };
        s.renormalize();
        s
    }

    /// Natural log of the modulus; −∞ for an exact zero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    /// The plain value. Overflows to ±inf (or underflows to 0) when the
    /// magnitude is outside double range.
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == ZERO
    }

    fn renormalize(&mut self) {
        let m = self.mantissa.norm();
        if m == 0.0 || !m.is_finite() {
            return;
        }
        if !(0.5..=2.0).contains(&m) {
            // powers of two keep the rescaling exact
            let e = m.log2().round();
            self.mantissa /= e.exp2();
            self.log_scale += e * std::f64::consts::LN_2;
        }
    }
}

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
    }

    /// ‖A*A − I‖ measured entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .max_abs_diff(&DenseMatrix::identity(self.n))
    }

    pub fn lu(&self) -> DenseLu {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_swaps = false;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd_swaps = !odd_swaps;
            }
            let pivot = a[k * n + k];
            if pivot == ZERO {
                continue;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= f * u;
                }
            }
        }
        DenseLu {
            n,
            lu: a,
            perm,
            odd_swaps,
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    odd_swaps: bool,
}

impl DenseLu {
    pub fn det(&self) -> ScaledComplex {
        let mut d = ScaledComplex::one();
        for k in 0..self.n {
            d = d.mul(self.lu[k * self.n + k]);
        }
        if self.odd_swaps {
            d.mantissa = -d.mantissa;
        }
        d
    }

    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|k| self.lu[k * self.n + k].norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Each row stores the columns `i − kl ..= i + ku + kl`; the extra `kl`
/// slots hold the fill-in created by row interchanges during LU.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![ZERO; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku + self.kl || i >= self.n || j >= self.n {
            return None;
        }
        Some(i * self.width + (j + self.kl - i))
    }

    /// Entry (i, j); zero outside the stored band.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.slot(i, j).map_or(ZERO, |s| self.data[s])
    }

    /// Sets an entry inside the declared band. Panics outside it, which
    /// would silently drop a nonzero otherwise.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i},{j}) outside band ({},{})",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j).expect("index in range");
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    /// Column range holding the declared band of row i.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Product of two band matrices; bandwidths add.
    pub fn mul(&self, other: &BandMatrix) -> BandMatrix {
        assert_eq!(self.n, other.n);
        let mut out = BandMatrix::zeros(self.n, self.kl + other.kl, self.ku + other.ku);
        for i in 0..self.n {
            for k in self.row_range(i) {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in other.row_range(k) {
                    out.add(i, j, a * other.get(k, j));
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> BandMatrix {
        let mut out = BandMatrix::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for j in self.row_range(i) {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// `a·self + b·other`, with the wider of the two bands.
    pub fn combine(&self, a: Complex64, other: &BandMatrix, b: Complex64) -> BandMatrix {
        assert_eq!(self.n, other.n);
        let mut out = BandMatrix::zeros(self.n, self.kl.max(other.kl), self.ku.max(other.ku));
        for i in 0..self.n {
            for j in self.row_range(i) {
                out.add(i, j, a * self.get(i, j));
            }
            for j in other.row_range(i) {
                out.add(i, j, b * other.get(i, j));
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in self.row_range(i) {
                d[(i, j)] = self.get(i, j);
            }
        }
        d
    }

    /// LU factorization with partial pivoting, O(n·kl·(kl+ku)).
    pub fn lu(&self) -> BandLu {
        let n = self.n;
        let kl = self.kl;
        let reach = self.ku + self.kl;
        let mut a = self.clone();
        let mut pivots = vec![0usize; n];
        let mut multipliers = vec![ZERO; n * kl.max(1)];
        let mut odd_swaps = false;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let mut p = k;
            let mut best = a.get(k, k).norm();
            for i in k + 1..=last_row {
                let v = a.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if p != k {
                odd_swaps = !odd_swaps;
                for j in k..=last_col {
                    let sk = a.slot(k, j).expect("pivot row slot");
                    let sp = a.slot(p, j).expect("swap row slot");
                    a.data.swap(sk, sp);
                }
            }
            let pivot = a.get(k, k);
            if pivot == ZERO {
                continue;
            }
            for i in k + 1..=last_row {
                let si = a.slot(i, k).expect("sub-diagonal slot");
                let f = a.data[si] / pivot;
                a.data[si] = ZERO;
                multipliers[k * kl + (i - k - 1)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = a.get(k, j);
                    if u != ZERO {
                        let s = a.slot(i, j).expect("fill-in slot");
                        a.data[s] -= f * u;
                    }
                }
            }
        }
        BandLu {
            u: a,
            pivots,
            multipliers,
            odd_swaps,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    u: BandMatrix,
    pivots: Vec<usize>,
    multipliers: Vec<Complex64>,
    odd_swaps: bool,
}

impl BandLu {
    pub fn det(&self) -> ScaledComplex {
        let mut d = ScaledComplex::one();
        for k in 0..self.u.n {
            d = d.mul(self.u.get(k, k));
        }
        if self.odd_swaps {
            d.mantissa = -d.mantissa;
        }
        d
    }

    pub fn min_pivot(&self) -> f64 {
        (0..self.u.n)
            .map(|k| self.u.get(k, k).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Solves A x = b in place. A zero pivot yields non-finite entries,
    /// which callers check for.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.u.n;
        let kl = self.u.kl;
        let reach = self.u.ku + kl;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                b[i] -= self.multipliers[k * kl + (i - k - 1)] * bk;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                s -= self.u.get(i, j) * b[j];
            }
            b[i] = s / self.u.get(i, i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_band(n: usize, kl: usize, ku: usize) -> BandMatrix {
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in m.row_range(i) {
                let t = (i * 7 + j * 13) as f64;
                m.set(i, j, c((t * 0.37).sin(), (t * 0.11).cos()));
            }
        }
        m
    }

    #[test]
    fn op_norm_of_diagonal_is_largest_modulus() {
        let m = [[c(3.0, 0.0), ZERO], [ZERO, c(0.0, -0.5)]];
        assert!((mat2_op_norm(&m) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn op_norm_matches_singular_values_of_rank_one() {
        // [[1,1],[1,1]] has singular values 2 and 0
        let m = [[ONE, ONE], [ONE, ONE]];
        assert!((mat2_op_norm(&m) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_complex_survives_overflowing_products() {
        let mut s = ScaledComplex::one();
        for _ in 0..2000 {
            s = s.mul(c(1e3, 0.0));
        }
        assert!((s.ln_abs() - 2000.0 * 1e3_f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn band_lu_matches_dense_lu() {
        for (n, kl, ku) in [(1, 1, 1), (5, 1, 1), (9, 2, 2), (17, 2, 1)] {
            let m = sample_band(n, kl, ku);
            let band_det = m.lu().det().value();
            let dense_det = m.to_dense().lu().det().value();
            assert!((band_det - dense_det).norm() <= 1e-12 * dense_det.norm().max(1.0));
        }
    }

    #[test]
    fn band_solve_inverts_product() {
        let m = sample_band(12, 2, 2);
        let x: Vec<Complex64> = (0..12).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let mut b = m.mul_vec(&x);
        m.lu().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn dense_solve_inverts_product() {
        let m = sample_band(8, 3, 3).to_dense();
        let x: Vec<Complex64> = (0..8).map(|i| c(1.0, i as f64)).collect();
        let y = m.lu().solve(&m.mul_vec(&x));
        for (u, v) in y.iter().zip(&x) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn band_product_matches_dense_product() {
        let a = sample_band(10, 1, 1);
        let b = sample_band(10, 1, 1).adjoint();
        let diff = a.mul(&b).to_dense().max_abs_diff(&a.to_dense().mul(&b.to_dense()));
        assert!(diff < 1e-14);
    }
}
