//! Python bindings: models, finite CMV truncations, Lyapunov estimates,
//! eigenpairs and the walk/CMV equivalence checks.

use cmvlab::cocycle::SpectralPoint;
use cmvlab::{lyapunov, qwalk, spectral};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(cmvlab_py, CmvlabError, PyValueError, "A cmvlab operation failed.");
create_exception!(cmvlab_py, ModelViolation, CmvlabError, "The model leaves the admissible class.");

fn to_py(e: cmvlab::Error) -> PyErr {
    if e.is_model_violation() {
        ModelViolation::new_err(e.to_string())
    } else {
        CmvlabError::new_err(e.to_string())
    }
}

fn phase(x: Vec<f64>) -> PyResult<cmvlab::Phase> {
    cmvlab::Phase::new(x).map_err(to_py)
}

/// Diophantine frequency vector ω.
#[pyclass(name = "Frequency", frozen)]
#[derive(Clone)]
struct PyFrequency(cmvlab::Frequency);

#[pymethods]
impl PyFrequency {
    /// Without coordinates, the default 2-d frequency (√2 − 1, √3 − 1).
    #[new]
    #[pyo3(signature = (coords=None, dioph_p=1e-3, dioph_q=None))]
    fn new(coords: Option<Vec<f64>>, dioph_p: f64, dioph_q: Option<f64>) -> PyResult<Self> {
        match coords {
            None => Ok(Self(cmvlab::Frequency::default_2d())),
            Some(c) => {
                let q = dioph_q.unwrap_or(c.len() as f64 + 1.0);
                cmvlab::Frequency::new(c, dioph_p, q).map(Self).map_err(to_py)
            }
        }
    }

    #[getter]
    fn coords(&self) -> Vec<f64> {
        self.0.coords().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Frequency({:?})", self.0.coords())
    }
}

/// Analytic sampling function α: 𝕋^d → 𝔻.
#[pyclass(name = "SamplingFunction", frozen)]
#[derive(Clone)]
struct PySamplingFunction(cmvlab::SamplingFunction);

#[pymethods]
impl PySamplingFunction {
    /// Trigonometric polynomial from `(k, c)` pairs, one term c·e^{2πi⟨k,x⟩} each.
    #[new]
    fn new(dim: usize, terms: Vec<(Vec<i32>, Complex64)>) -> PyResult<Self> {
        let poly = cmvlab::TrigPoly::new(dim, terms).map_err(to_py)?;
        cmvlab::SamplingFunction::new(poly).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (dim=2))]
    fn zero(dim: usize) -> Self {
        Self(cmvlab::SamplingFunction::zero(dim))
    }

    #[staticmethod]
    fn constant(dim: usize, c: Complex64) -> PyResult<Self> {
        cmvlab::SamplingFunction::constant(dim, c).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn harmonic(lam: Complex64, k: Vec<i32>) -> PyResult<Self> {
        cmvlab::SamplingFunction::harmonic(lam, k).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn real_trig(lam: f64) -> PyResult<Self> {
        cmvlab::SamplingFunction::real_trig(lam).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn strong_coupling() -> Self {
        Self(cmvlab::SamplingFunction::strong_coupling())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Certified upper bound on sup|α|.
    #[getter]
    fn sup_bound(&self) -> f64 {
        self.0.sup_bound()
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<Complex64> {
        Ok(self.0.eval(&phase(x)?))
    }
}

/// SU(2)-valued coin field of a split-step walk.
#[pyclass(name = "CoinField", frozen)]
#[derive(Clone)]
struct PyCoinField(cmvlab::CoinField);

#[pymethods]
impl PyCoinField {
    #[staticmethod]
    #[pyo3(signature = (dim=2))]
    fn identity(dim: usize) -> Self {
        Self(cmvlab::CoinField::identity(dim))
    }

    #[staticmethod]
    #[pyo3(signature = (dim=2))]
    fn hadamard(dim: usize) -> Self {
        Self(cmvlab::CoinField::hadamard(dim))
    }

    #[staticmethod]
    fn quasi_periodic_rotation(theta0: f64, a: f64, b: f64) -> Self {
        Self(cmvlab::CoinField::quasi_periodic_rotation(theta0, a, b))
    }

    #[staticmethod]
    fn strong_coupling() -> Self {
        Self(cmvlab::CoinField::strong_coupling())
    }
}

#[pyclass(name = "LyapunovEstimate", frozen, get_all)]
struct PyLyapunovEstimate {
    n: usize,
    theta: f64,
    mean: f64,
    stderr: f64,
    samples: usize,
    seed: u64,
}

#[pymethods]
impl PyLyapunovEstimate {
    fn __repr__(&self) -> String {
        format!("LyapunovEstimate(n={}, theta={}, mean={}, stderr={})", self.n, self.theta, self.mean, self.stderr)
    }
}

#[pyclass(name = "LdtReport", frozen, get_all)]
struct PyLdtReport {
    n: usize,
    tau: f64,
    deviation_threshold: f64,
    measure: f64,
    exceptional_count: usize,
    samples: usize,
    l_n: f64,
}

#[pyclass(name = "EigenPair", frozen, get_all)]
struct PyEigenPair {
    theta: f64,
    first_site: i64,
    vector: Vec<Complex64>,
    residual: f64,
}

#[pymethods]
impl PyEigenPair {
    /// Exponential decay fit of |v| away from its peak.
    fn localization(&self) -> PyResult<PyLocalizationFit> {
        let fit = spectral::localization_fit_values(&self.vector, self.first_site).map_err(to_py)?;
        Ok(PyLocalizationFit {
            center: fit.center,
            rate: fit.rate,
            fit_quality: fit.fit_quality,
            tail_fraction: fit.tail_fraction,
        })
    }
}

#[pyclass(name = "LocalizationFit", frozen, get_all)]
struct PyLocalizationFit {
    center: i64,
    rate: f64,
    fit_quality: f64,
    tail_fraction: f64,
}

#[pyclass(name = "EquivReport", frozen, get_all)]
struct PyEquivReport {
    residual: f64,
    rows_compared: usize,
    lambda_defect: f64,
    formula_gap: f64,
}

#[pyclass(name = "WalkLyapunov", frozen, get_all)]
struct PyWalkLyapunov {
    theta: f64,
    l_walk: f64,
    l_walk_stderr: f64,
    l_hat: f64,
    l_hat_stderr: f64,
    consistent: bool,
}

/// Boundary-modified CMV truncation on [a, b].
#[pyclass(name = "FiniteCMV", frozen)]
struct PyFiniteCMV(cmvlab::FiniteCMV);

#[pymethods]
impl PyFiniteCMV {
    /// `interior` holds α_a, …, α_{b−1}.
    #[new]
    #[pyo3(signature = (a, b, interior, beta=Complex64::new(1.0, 0.0), eta=Complex64::new(1.0, 0.0)))]
    fn new(a: i64, b: i64, interior: Vec<Complex64>, beta: Complex64, eta: Complex64) -> PyResult<Self> {
        cmvlab::FiniteCMV::new(a, b, &interior, beta, eta).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (alpha, x0, omega, a, b, beta=Complex64::new(1.0, 0.0), eta=Complex64::new(1.0, 0.0)))]
    #[allow(clippy::too_many_arguments)]
    fn from_model(
        alpha: &PySamplingFunction,
        x0: Vec<f64>,
        omega: &PyFrequency,
        a: i64,
        b: i64,
        beta: Complex64,
        eta: Complex64,
    ) -> PyResult<Self> {
        cmvlab::FiniteCMV::from_model(&alpha.0, &phase(x0)?, &omega.0, a, b, beta, eta)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn interval(&self) -> (i64, i64) {
        (self.0.a(), self.0.b())
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }

    /// The matrix as a list of rows.
    fn dense(&self) -> Vec<Vec<Complex64>> {
        let e = self.0.dense_e();
        (0..e.dim()).map(|i| (0..e.dim()).map(|j| e[(i, j)]).collect()).collect()
    }

    /// det(z − E); may overflow on very long intervals, see `log_abs_char_det`.
    fn char_det(&self, z: Complex64) -> Complex64 {
        self.0.char_det(z).value
    }

    fn log_abs_char_det(&self, z: Complex64) -> f64 {
        self.0.char_det(z).log_abs
    }

    /// |G(j, k; z)| from the determinant product formula; |z| must be 1.
    fn green_magnitude(&self, j: i64, k: i64, z: Complex64) -> PyResult<f64> {
        self.0.green_magnitude_product(j, k, z).map_err(to_py)
    }

    /// Column k of (E − z)⁻¹.
    fn green_column(&self, k: i64, z: Complex64) -> PyResult<Vec<Complex64>> {
        self.0.green_column(k, z).map_err(to_py)
    }

    /// Sorted eigenphases in [0, 2π).
    fn eigenphases(&self, py: Python<'_>) -> PyResult<Vec<f64>> {
        py.allow_threads(|| spectral::eigenphases_auto(&self.0)).map_err(to_py)
    }

    fn eigenpairs(&self, py: Python<'_>) -> PyResult<Vec<PyEigenPair>> {
        let pairs = py.allow_threads(|| spectral::eigenpairs(&self.0)).map_err(to_py)?;
        Ok(pairs
            .into_iter()
            .map(|p| PyEigenPair {
                theta: p.theta,
                first_site: p.first_site,
                vector: p.vector,
                residual: p.residual,
            })
            .collect())
    }
}

/// L_n(z) at z = e^{iθ}, averaged over seeded random phases.
#[pyfunction]
#[pyo3(signature = (alpha, theta, n, samples=1000, seed=0, omega=None))]
fn finite_lyapunov(
    py: Python<'_>,
    alpha: &PySamplingFunction,
    theta: f64,
    n: usize,
    samples: usize,
    seed: u64,
    omega: Option<&PyFrequency>,
) -> PyResult<PyLyapunovEstimate> {
    let omega = omega.map_or_else(cmvlab::Frequency::default_2d, |w| w.0.clone());
    let z = SpectralPoint::new(theta);
    let est = py
        .allow_threads(|| lyapunov::finite_lyapunov(&alpha.0, &omega, &z, n, samples, seed))
        .map_err(to_py)?;
    Ok(PyLyapunovEstimate {
        n: est.n,
        theta,
        mean: est.mean,
        stderr: est.stderr,
        samples: est.sample_count,
        seed: est.seed,
    })
}

/// Measure of {x : |log‖M_n(x)‖ − nL_n| > n^{1−τ}}.
#[pyfunction]
#[pyo3(signature = (alpha, theta, n, tau=0.3, samples=1000, seed=0, omega=None))]
#[allow(clippy::too_many_arguments)]
fn ldt_measure(
    py: Python<'_>,
    alpha: &PySamplingFunction,
    theta: f64,
    n: usize,
    tau: f64,
    samples: usize,
    seed: u64,
    omega: Option<&PyFrequency>,
) -> PyResult<PyLdtReport> {
    let omega = omega.map_or_else(cmvlab::Frequency::default_2d, |w| w.0.clone());
    let z = SpectralPoint::new(theta);
    let r = py
        .allow_threads(|| lyapunov::ldt_measure(&alpha.0, &omega, &z, n, tau, samples, seed, None))
        .map_err(to_py)?;
    Ok(PyLdtReport {
        n: r.n,
        tau: r.tau,
        deviation_threshold: r.deviation_threshold,
        measure: r.measure_estimate,
        exceptional_count: r.exceptional_count,
        samples: r.sample_count,
        l_n: r.l_n,
    })
}

/// Compares the gauged walk operator with the CMV matrix of its hatted coefficients.
#[pyfunction]
#[pyo3(signature = (coins, x0, s0, s1, omega=None))]
fn unitary_equiv_check(
    coins: &PyCoinField,
    x0: Vec<f64>,
    s0: i64,
    s1: i64,
    omega: Option<&PyFrequency>,
) -> PyResult<PyEquivReport> {
    let omega = omega.map_or_else(cmvlab::Frequency::default_2d, |w| w.0.clone());
    let r = qwalk::unitary_equiv_check(&coins.0, &phase(x0)?, &omega, s0, s1).map_err(to_py)?;
    Ok(PyEquivReport {
        residual: r.residual,
        rows_compared: r.rows_compared,
        lambda_defect: r.lambda_defect,
        formula_gap: r.formula_gap,
    })
}

/// Lyapunov exponents of the walk cocycle and of the equivalent CMV cocycle.
#[pyfunction]
#[pyo3(signature = (coins, theta, n, samples=200, seed=0, omega=None))]
fn walk_lyapunov_compare(
    py: Python<'_>,
    coins: &PyCoinField,
    theta: f64,
    n: usize,
    samples: usize,
    seed: u64,
    omega: Option<&PyFrequency>,
) -> PyResult<PyWalkLyapunov> {
    let omega = omega.map_or_else(cmvlab::Frequency::default_2d, |w| w.0.clone());
    let z = SpectralPoint::new(theta);
    let r = py
        .allow_threads(|| qwalk::walk_lyapunov_compare(&coins.0, &omega, &z, n, samples, seed))
        .map_err(to_py)?;
    Ok(PyWalkLyapunov {
        theta,
        l_walk: r.l_walk,
        l_walk_stderr: r.l_walk_stderr,
        l_hat: r.l_hat,
        l_hat_stderr: r.l_hat_stderr,
        consistent: r.consistent(),
    })
}

#[pymodule]
fn cmvlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CmvlabError", m.py().get_type::<CmvlabError>())?;
    m.add("ModelViolation", m.py().get_type::<ModelViolation>())?;
    m.add_class::<PyFrequency>()?;
    m.add_class::<PySamplingFunction>()?;
    m.add_class::<PyCoinField>()?;
    m.add_class::<PyFiniteCMV>()?;
    m.add_class::<PyEigenPair>()?;
    m.add_class::<PyLocalizationFit>()?;
    m.add_class::<PyLyapunovEstimate>()?;
    m.add_class::<PyLdtReport>()?;
    m.add_class::<PyEquivReport>()?;
    m.add_class::<PyWalkLyapunov>()?;
    m.add_function(wrap_pyfunction!(finite_lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(ldt_measure, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_equiv_check, m)?)?;
    m.add_function(wrap_pyfunction!(walk_lyapunov_compare, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
