//! Python bindings: potentials, Prüfer integration and the main certificates.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use dirac::constructors::{
    assemble_multi, make_critical_staircase, make_locked_coulomb, make_supercritical, schedule_pieces,
    AssemblyParams, GrowthBudget, SchedulePolicy, DEFAULT_C_AMP,
};
use dirac::verify::{
    calibrate_k_gap, check_no_eigenvalue_bound, critical_tail_series, fit_decay_exponent, l2_tail_estimate_with,
    L2Verdict, DEFAULT_L2_MARGIN,
};
use dirac::{BoundaryAngle, EigenTarget, PotentialSpec, PrueferTrajectory, DEFAULT_TOL};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: dirac::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn targets_from(pairs: Vec<(f64, f64)>) -> Vec<EigenTarget> {
    pairs.into_iter().map(|(l, th)| EigenTarget::new(l, BoundaryAngle::normalized(th))).collect()
}

/// Piecewise polar potential on `[0, inf)`.
#[pyclass(name = "Potential", module = "embedded_dirac", frozen)]
struct PyPotential(PotentialSpec);

#[pymethods]
impl PyPotential {
    /// `V = a/(1+x)` locked to `lam`; any real amplitude.
    #[staticmethod]
    #[pyo3(signature = (lam, a, theta0=0.0))]
    fn locked_coulomb(lam: f64, a: f64, theta0: f64) -> PyResult<Self> {
        make_locked_coulomb(lam, a, BoundaryAngle::normalized(theta0)).map(Self).map_err(py_err)
    }

    /// Single embedded eigenvalue, `a > 1/2`.
    #[staticmethod]
    #[pyo3(signature = (lam, a, theta0=0.0))]
    fn supercritical(lam: f64, a: f64, theta0: f64) -> PyResult<Self> {
        make_supercritical(lam, a, BoundaryAngle::normalized(theta0)).map(Self).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (lam, theta0=0.0, n_max=4))]
    fn critical_staircase(lam: f64, theta0: f64, n_max: u32) -> PyResult<Self> {
        make_critical_staircase(lam, BoundaryAngle::normalized(theta0), n_max).map(Self).map_err(py_err)
    }

    /// Round-robin bumps embedding every `(lambda, theta0)` in `targets`.
    ///
    /// `budget` is `None`, `"log"` or a power `p > 0`.
    #[staticmethod]
    #[pyo3(signature = (targets, x_start, k_gap, full_blocks=2, c_amp=DEFAULT_C_AMP, budget=None))]
    fn multi(
        targets: Vec<(f64, f64)>,
        x_start: f64,
        k_gap: f64,
        full_blocks: usize,
        c_amp: f64,
        budget: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        let budget = match budget {
            None => None,
            Some(b) if b.extract::<String>().is_ok_and(|s| s == "log") => Some(GrowthBudget::Log),
            Some(b) => Some(GrowthBudget::Power {
                p: b.extract().map_err(|_| PyValueError::new_err("budget must be \"log\" or a float"))?,
            }),
        };
        let targets = targets_from(targets);
        let policy = SchedulePolicy { c_amp, full_blocks, ..Default::default() };
        let schedule = schedule_pieces(&targets, budget, x_start, &policy).map_err(py_err)?;
        let params = AssemblyParams { k_gap, ..Default::default() };
        assemble_multi(&targets, &schedule, &params).map(Self).map_err(py_err)
    }

    /// `(V, phi)` at `x`.
    fn eval(&self, x: f64) -> PyResult<(f64, f64)> {
        self.0.eval(x).map_err(py_err)
    }

    /// `(p, q)` at `x`.
    fn pq(&self, x: f64) -> PyResult<(f64, f64)> {
        self.0.pq_at(x).map_err(py_err)
    }

    fn envelope(&self, x: f64) -> PyResult<f64> {
        self.0.envelope(x).map_err(py_err)
    }

    /// `(x_lo, x_hi)` of every segment.
    fn breakpoints(&self) -> Vec<(f64, f64)> {
        self.0.segments().iter().map(|s| (s.x_lo, s.x_hi)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.segments().len()
    }

    fn __repr__(&self) -> String {
        format!("Potential(segments={})", self.0.segments().len())
    }
}

/// Samples of `(x, ln R, theta)` for one `lambda`.
#[pyclass(name = "Trajectory", module = "embedded_dirac", frozen)]
struct PyTrajectory(PrueferTrajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn x(&self) -> Vec<f64> {
        self.0.samples().iter().map(|s| s.x).collect()
    }

    #[getter]
    fn ln_r(&self) -> Vec<f64> {
        self.0.samples().iter().map(|s| s.ln_r).collect()
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.0.samples().iter().map(|s| s.theta).collect()
    }

    /// Interpolated `ln R(x)`; `None` outside the span.
    fn ln_r_at(&self, x: f64) -> Option<f64> {
        self.0.ln_r_at(x)
    }

    fn theta_at(&self, x: f64) -> Option<f64> {
        self.0.theta_at(x)
    }

    /// `(alpha, residual)` of the fit `ln R ~ c - alpha ln(1+x)` on `window`.
    fn decay_exponent(&self, window: (f64, f64)) -> PyResult<(f64, f64)> {
        fit_decay_exponent(&self.0, window).map(|f| (f.alpha, f.residual)).map_err(py_err)
    }

    /// `"converging"`, `"diverging"` or `"inconclusive"` for the tail of `R^2`.
    #[pyo3(signature = (from_x=0.0, margin=DEFAULT_L2_MARGIN))]
    fn l2_verdict(&self, from_x: f64, margin: f64) -> PyResult<&'static str> {
        let est = l2_tail_estimate_with(&self.0, from_x, margin).map_err(py_err)?;
        Ok(match est.verdict {
            L2Verdict::Converging => "converging",
            L2Verdict::Diverging => "diverging",
            L2Verdict::Inconclusive => "inconclusive",
        })
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.0.span();
        format!("Trajectory(span=({a}, {b}), samples={})", self.0.len())
    }
}

/// Integrates the `lam`-solution with boundary angle `theta0` across `span`.
#[pyfunction]
#[pyo3(signature = (potential, lam, theta0, span, tol=DEFAULT_TOL))]
fn integrate(
    py: Python<'_>,
    potential: &PyPotential,
    lam: f64,
    theta0: f64,
    span: (f64, f64),
    tol: f64,
) -> PyResult<PyTrajectory> {
    let pot = potential.0.clone();
    py.detach(move || dirac::integrate_prufer(&pot, lam, BoundaryAngle::normalized(theta0), span, tol))
        .map(PyTrajectory)
        .map_err(py_err)
}

/// Raw `(x, u, v)` samples from the fixed-step oracle; short spans only.
#[pyfunction]
#[pyo3(signature = (potential, lam, theta0, span, tol=DEFAULT_TOL))]
fn integrate_direct(
    potential: &PyPotential,
    lam: f64,
    theta0: f64,
    span: (f64, f64),
    tol: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let init = (theta0.cos(), theta0.sin());
    dirac::integrate_direct(&potential.0, lam, init, span, tol)
        .map(|s| s.into_iter().map(|d| (d.x, d.u, d.v)).collect())
        .map_err(py_err)
}

/// Lower-bound certificate ruling out `lam` as an eigenvalue.
///
/// Returns a dict with `amplitude_limsup`, `exponent`, `x_ref`, `min_margin` and `passed`.
#[pyfunction]
#[pyo3(signature = (potential, lam, theta0, span, eps=0.04, tol=DEFAULT_TOL))]
fn no_eigenvalue_bound<'py>(
    py: Python<'py>,
    potential: &PyPotential,
    lam: f64,
    theta0: f64,
    span: (f64, f64),
    eps: f64,
    tol: f64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let c = check_no_eigenvalue_bound(&potential.0, lam, BoundaryAngle::normalized(theta0), span, eps, tol)
        .map_err(py_err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("amplitude_limsup", c.amplitude_limsup)?;
    d.set_item("eps", c.eps)?;
    d.set_item("exponent", c.exponent)?;
    d.set_item("x_ref", c.x_ref)?;
    d.set_item("min_margin", c.min_margin)?;
    d.set_item("passed", c.passed)?;
    Ok(d)
}

/// Gap constant `K` making bumps at `x0 - b > K` admissible.
#[pyfunction]
#[pyo3(signature = (lam, others, c_amp=DEFAULT_C_AMP, tol=DEFAULT_TOL))]
fn k_gap(lam: f64, others: Vec<f64>, c_amp: f64, tol: f64) -> PyResult<f64> {
    calibrate_k_gap(lam, &others, c_amp, tol).map_err(py_err)
}

/// `(n, ln R(a_n), ln of the integral of R^2 over [a_n, a_{n+1}])` of the critical staircase.
#[pyfunction]
fn critical_series(n_lo: u32, n_hi: u32) -> Vec<(u32, f64, f64)> {
    critical_tail_series(n_lo..=n_hi).into_iter().map(|t| (t.n, t.ln_r_at_a_n, t.ln_integral)).collect()
}

#[pymodule]
#[pyo3(name = "embedded_dirac")]
pub fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_direct, m)?)?;
    m.add_function(wrap_pyfunction!(no_eigenvalue_bound, m)?)?;
    m.add_function(wrap_pyfunction!(k_gap, m)?)?;
    m.add_function(wrap_pyfunction!(critical_series, m)?)?;
    Ok(())
}
