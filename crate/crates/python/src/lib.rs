//! Python bindings. Matrices cross the boundary as lists of rows.

use std::collections::BTreeSet;

use decentral_lqr::decentral::{self, NeighborhoodMap, Thm1System};
use decentral_lqr::{cli, io, lqr, matcore, models, secondorder, spectral, sweep, Error, Matrix};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(decentral_lqr, SolverError, PyException, "A numerical solve failed on well-formed input.");

fn to_py(e: Error) -> PyErr {
    if e.is_solver_failure() {
        SolverError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

type Rows = Vec<Vec<f64>>;

fn matrix(rows: Rows) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(to_py)
}

fn neighborhoods(sets: Option<Vec<Vec<usize>>>, n: usize) -> PyResult<NeighborhoodMap> {
    match sets {
        Some(sets) => NeighborhoodMap::new(sets.into_iter().map(BTreeSet::from_iter).collect()).map_err(to_py),
        None => Ok(NeighborhoodMap::diagonal(n)),
    }
}

#[pyclass(name = "LqrSolution", frozen)]
struct PyLqrSolution {
    inner: lqr::LqrSolution,
}

#[pymethods]
impl PyLqrSolution {
    #[getter(P)]
    fn p(&self) -> Rows {
        self.inner.care.p.to_rows()
    }

    #[getter(K)]
    fn k(&self) -> Rows {
        self.inner.care.k.to_rows()
    }

    #[getter]
    fn h2(&self) -> f64 {
        self.inner.h2()
    }

    #[getter]
    fn h2_squared(&self) -> f64 {
        self.inner.h2_squared
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.care.residual
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.care.iterations
    }

    fn __repr__(&self) -> String {
        format!("LqrSolution(h2={}, residual={:e})", self.inner.h2(), self.inner.care.residual)
    }
}

#[pyclass(name = "DecentralReport", frozen)]
struct PyDecentralReport {
    inner: decentral::DecentralReport,
}

#[pymethods]
impl PyDecentralReport {
    #[getter]
    fn oracle_decentralized(&self) -> bool {
        self.inner.oracle_decentralized
    }

    #[getter]
    fn offdiag_mass(&self) -> f64 {
        self.inner.offdiag_mass
    }

    #[getter]
    fn scalar_gain_c(&self) -> Option<f64> {
        self.inner.scalar_gain_c
    }

    #[getter(K)]
    fn k(&self) -> Rows {
        self.inner.k.to_rows()
    }

    /// `{name: (holds, witness)}` for every analytic verdict.
    fn verdicts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for v in &self.inner.analytic_verdicts {
            out.set_item(&v.name, (v.holds, v.witness.clone()))?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "DecentralReport(oracle_decentralized={}, offdiag_mass={:e})",
            self.inner.oracle_decentralized, self.inner.offdiag_mass
        )
    }
}

#[pyclass(name = "LqrProblem", frozen)]
struct PyLqrProblem {
    inner: lqr::LqrProblem,
}

#[pymethods]
impl PyLqrProblem {
    #[new]
    #[pyo3(signature = (A, B, Q, R))]
    #[allow(non_snake_case)]
    fn new(A: Rows, B: Rows, Q: Rows, R: Rows) -> PyResult<Self> {
        let inner = lqr::LqrProblem::new(matrix(A)?, matrix(B)?, matrix(Q)?, matrix(R)?).map_err(to_py)?;
        Ok(PyLqrProblem { inner })
    }

    #[getter]
    fn n_states(&self) -> usize {
        self.inner.n_states()
    }

    #[getter]
    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }

    fn solve(&self, py: Python<'_>) -> PyResult<PyLqrSolution> {
        let inner = py.detach(|| lqr::solve_lqr(&self.inner)).map_err(to_py)?;
        Ok(PyLqrSolution { inner })
    }

    /// Solves and checks the gain against `neighborhoods` (0-based state
    /// indices per input); the default is one state per input.
    #[pyo3(signature = (neighborhoods = None))]
    fn oracle_check(&self, py: Python<'_>, neighborhoods: Option<Vec<Vec<usize>>>) -> PyResult<PyDecentralReport> {
        let map = self::neighborhoods(neighborhoods, self.inner.n_states())?;
        let inner = py.detach(|| decentral::oracle_check(&self.inner, &map)).map_err(to_py)?;
        Ok(PyDecentralReport { inner })
    }
}

#[pyclass(name = "CirculantSpec", frozen)]
struct PyCirculantSpec {
    inner: spectral::CirculantSpec,
}

#[pymethods]
impl PyCirculantSpec {
    #[new]
    fn new(first_row: Vec<f64>) -> PyResult<Self> {
        Ok(PyCirculantSpec {
            inner: spectral::CirculantSpec::new(first_row).map_err(to_py)?,
        })
    }

    #[getter]
    fn first_row(&self) -> Vec<f64> {
        self.inner.first_row().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    /// Frequency symbols `m̂(κ) = Σ c_l e^{2πiκl/n}`.
    fn eigenvalues(&self) -> Vec<Complex64> {
        self.inner.eigenvalues().values
    }

    fn materialize(&self) -> Rows {
        self.inner.materialize().to_rows()
    }
}

#[pyclass(name = "SecondOrderSolution", frozen)]
struct PySecondOrderSolution {
    inner: secondorder::SecondOrderSolution,
}

#[pymethods]
impl PySecondOrderSolution {
    #[getter(P1)]
    fn p1(&self) -> Rows {
        self.inner.p1.to_rows()
    }

    #[getter(P2)]
    fn p2(&self) -> Rows {
        self.inner.p2.to_rows()
    }

    #[getter(Qbar)]
    fn qbar(&self) -> Rows {
        self.inner.qbar.to_rows()
    }

    #[getter]
    fn gain_pos(&self) -> Rows {
        self.inner.gain_pos.to_rows()
    }

    #[getter]
    fn gain_vel(&self) -> Rows {
        self.inner.gain_vel.to_rows()
    }

    #[getter(full_P)]
    fn full_p(&self) -> Rows {
        self.inner.full_p.to_rows()
    }

    #[getter]
    fn full_gain(&self) -> Rows {
        self.inner.full_gain.to_rows()
    }

    #[getter]
    fn agreement_residual(&self) -> f64 {
        self.inner.agreement_residual
    }

    #[getter]
    fn full_p1_asymmetry(&self) -> f64 {
        self.inner.full_p1_asymmetry
    }

    #[pyo3(signature = (tol = decentral::ORACLE_TOL))]
    fn check(&self, tol: f64) -> PyResult<PyDecentralReport> {
        let inner = secondorder::check_second_order_decentral(&self.inner, tol).map_err(to_py)?;
        Ok(PyDecentralReport { inner })
    }
}

#[pyfunction]
#[pyo3(signature = (A, B, Q, R))]
#[allow(non_snake_case)]
fn solve_care<'py>(py: Python<'py>, A: Rows, B: Rows, Q: Rows, R: Rows) -> PyResult<Bound<'py, PyDict>> {
    let (a, b, q, r) = (matrix(A)?, matrix(B)?, matrix(Q)?, matrix(R)?);
    let res = py.detach(|| matcore::solve_care(&a, &b, &q, &r)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("P", res.p.to_rows())?;
    out.set_item("K", res.k.to_rows())?;
    out.set_item("residual", res.residual)?;
    out.set_item("iterations", res.iterations)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (A, Q))]
#[allow(non_snake_case)]
fn solve_lyapunov(A: Rows, Q: Rows) -> PyResult<Rows> {
    Ok(matcore::solve_lyapunov(&matrix(A)?, &matrix(Q)?).map_err(to_py)?.to_rows())
}

#[pyfunction]
#[pyo3(signature = (K, neighborhoods = None, tol = decentral::PATTERN_DEFAULT_TOL))]
#[allow(non_snake_case)]
fn pattern_decentralized(K: Rows, neighborhoods: Option<Vec<Vec<usize>>>, tol: f64) -> PyResult<(bool, f64)> {
    let k = matrix(K)?;
    let map = self::neighborhoods(neighborhoods, k.rows())?;
    decentral::pattern_decentralized(&k, &map, tol).map_err(to_py)
}

/// Checks the four 2×2 conditions; returns a dict of flags and ratios.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn thm1_check<'py>(
    py: Python<'py>,
    a0: f64,
    a1: f64,
    a_minus1: f64,
    a2: f64,
    q0: f64,
    q2: f64,
    gamma0: f64,
    gamma2: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sys = Thm1System::new([a0, a1, a_minus1, a2], [q0, q2], [gamma0, gamma2]).map_err(to_py)?;
    let v = decentral::thm1_check(&sys).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("holds", v.holds)?;
    out.set_item("opposite_coupling", v.opposite_coupling)?;
    out.set_item("same_sign_diagonal", v.same_sign_diagonal)?;
    out.set_item("q_ratio_matches", v.q_ratio_matches)?;
    out.set_item("gamma_ratio_matches", v.gamma_ratio_matches)?;
    out.set_item("required_q_ratio", v.required_q_ratio)?;
    out.set_item("required_gamma_ratio", v.required_gamma_ratio)?;
    Ok(out)
}

/// Returns `(q0, gamma0)` that decentralize the 2×2 system for the given `q2`, `gamma2`.
#[pyfunction]
fn thm1_synthesize(a0: f64, a1: f64, a_minus1: f64, a2: f64, q2: f64, gamma2: f64) -> PyResult<(f64, f64)> {
    let sys = decentral::thm1_synthesize(a0, a1, a_minus1, a2, q2, gamma2).map_err(to_py)?;
    Ok((sys.q0, sys.gamma0))
}

fn spec(row: Vec<f64>) -> PyResult<spectral::CirculantSpec> {
    spectral::CirculantSpec::new(row).map_err(to_py)
}

/// Common scalar gain `c` with `K = cI` for circulant first rows, or `None`.
#[pyfunction]
#[pyo3(signature = (a, b, q, r, tol = decentral::THM2_DEFAULT_TOL))]
fn thm2_find_c(a: Vec<f64>, b: Vec<f64>, q: Vec<f64>, r: Vec<f64>, tol: f64) -> PyResult<Option<f64>> {
    decentral::thm2_find_c(&spec(a)?, &spec(b)?, &spec(q)?, &spec(r)?, tol).map_err(to_py)
}

/// Ratio test for 2×2 circulants; returns `(holds, c)`.
#[pyfunction]
fn cor3_check(a: Vec<f64>, b: Vec<f64>, q: Vec<f64>, r: Vec<f64>) -> PyResult<(bool, Option<f64>)> {
    let v = decentral::cor3_check(&spec(a)?, &spec(b)?, &spec(q)?, &spec(r)?).map_err(to_py)?;
    Ok((v.holds, v.c))
}

#[pyfunction]
#[pyo3(signature = (A1, A2, B0, Q0, Q2, R0))]
#[allow(non_snake_case)]
fn reduce_and_solve(
    py: Python<'_>,
    A1: Rows,
    A2: Rows,
    B0: Rows,
    Q0: Rows,
    Q2: Rows,
    R0: Rows,
) -> PyResult<PySecondOrderSolution> {
    let sys = secondorder::SecondOrderSystem::new(
        matrix(A1)?,
        matrix(A2)?,
        matrix(B0)?,
        matrix(Q0)?,
        matrix(Q2)?,
        matrix(R0)?,
    )
    .map_err(to_py)?;
    let inner = py.detach(|| secondorder::reduce_and_solve(&sys)).map_err(to_py)?;
    Ok(PySecondOrderSolution { inner })
}

#[pyfunction]
fn diffusion_operator(n: usize, delta: f64) -> PyResult<PyCirculantSpec> {
    Ok(PyCirculantSpec {
        inner: models::diffusion_operator(n, delta).map_err(to_py)?,
    })
}

#[pyfunction]
fn predator_prey_jacobian(r1: f64, r2: f64, k1: f64, k2: f64, b: f64, e: f64) -> PyResult<Rows> {
    let p = models::PredatorPreyParams::new(r1, r2, k1, k2, b, e).map_err(to_py)?;
    Ok(models::predator_prey_jacobian(&p).map_err(to_py)?.to_rows())
}

/// Runs a sweep config given as JSON; returns `(csv, summary_json)`.
#[pyfunction]
fn run_sweep(py: Python<'_>, config_json: &str) -> PyResult<(String, String)> {
    let cfg = sweep::SweepConfig::from_json(config_json).map_err(to_py)?;
    let output = py.detach(|| sweep::run_sweep(&cfg)).map_err(to_py)?;
    Ok((sweep::csv_string(&output.result), io::to_json_17(&output)))
}

/// Runs `thm1`, `thm2`, `cor3` or `oracle` on a system file's JSON text;
/// returns the report as JSON.
#[pyfunction]
fn check_system(system_json: &str, which: &str) -> PyResult<String> {
    let kind = match which {
        "thm1" => cli::CheckKind::Thm1,
        "thm2" => cli::CheckKind::Thm2,
        "cor3" => cli::CheckKind::Cor3,
        "oracle" => cli::CheckKind::Oracle,
        other => return Err(PyValueError::new_err(format!("unknown check '{other}'"))),
    };
    let file = io::SystemFile::from_json(system_json).map_err(to_py)?;
    let report = cli::check_system(&file, kind).map_err(to_py)?;
    Ok(io::to_json_17(&report))
}

#[pymodule]
#[pyo3(name = "decentral_lqr")]
fn decentral_lqr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add_class::<PyLqrProblem>()?;
    m.add_class::<PyLqrSolution>()?;
    m.add_class::<PyDecentralReport>()?;
    m.add_class::<PyCirculantSpec>()?;
    m.add_class::<PySecondOrderSolution>()?;
    m.add_function(wrap_pyfunction!(solve_care, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(pattern_decentralized, m)?)?;
    m.add_function(wrap_pyfunction!(thm1_check, m)?)?;
    m.add_function(wrap_pyfunction!(thm1_synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(thm2_find_c, m)?)?;
    m.add_function(wrap_pyfunction!(cor3_check, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_and_solve, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_operator, m)?)?;
    m.add_function(wrap_pyfunction!(predator_prey_jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(check_system, m)?)?;
    Ok(())
}
