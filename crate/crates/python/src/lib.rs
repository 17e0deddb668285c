//! Python bindings: construct solvable position-dependent-mass systems,
//! apply ΔQ generators, and verify against the finite-difference oracle.

use pdmforge_core::pct::{
    apply_delta_q, construct_hermite_harmonic, construct_laguerre_exponential, delta_q_two_over_g,
    ConstructedSystem, DeltaQ, Grid1D, PerturbationResult,
};
use pdmforge_core::specfam;
use pdmforge_core::vonroos::{verify_system, VerifyOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn value_err<E: std::fmt::Display>(err: E) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// A constructed solvable system: grid samples of the potential, the
/// closed-form energies, and the normalized states.
#[pyclass(name = "System")]
struct PySystem {
    inner: ConstructedSystem,
}

#[pymethods]
impl PySystem {
    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.grid().points().collect()
    }

    #[getter]
    fn potential(&self) -> Vec<f64> {
        self.inner.potential().to_vec()
    }

    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.inner.energies().to_vec()
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    #[getter]
    fn gauge_note(&self) -> String {
        self.inner.gauge_note().to_string()
    }

    fn psi(&self, n: usize) -> PyResult<Vec<f64>> {
        if n > self.inner.n_max() {
            return Err(PyValueError::new_err(format!(
                "level {n} exceeds n_max = {}",
                self.inner.n_max()
            )));
        }
        Ok(self.inner.psi(n).to_vec())
    }

    /// Applies the closed-form `2/g` generator (default: ground state).
    #[pyo3(signature = (level = 0, override_node_guard = false))]
    fn perturb_two_over_g(
        &self,
        level: usize,
        override_node_guard: bool,
    ) -> PyResult<PyPerturbation> {
        delta_q_two_over_g(&self.inner, level, override_node_guard)
            .map(|inner| PyPerturbation { inner })
            .map_err(value_err)
    }

    /// Applies a named generator from the registry
    /// (`zero`, `constant`, `two_over_g`, `linear_in_g`).
    #[pyo3(signature = (kind, coefficient = None, level = 0, override_node_guard = false))]
    fn apply_delta_q(
        &self,
        kind: &str,
        coefficient: Option<f64>,
        level: usize,
        override_node_guard: bool,
    ) -> PyResult<PyPerturbation> {
        let generator = match (kind, coefficient) {
            ("zero", _) => DeltaQ::Zero,
            ("constant", Some(c)) => DeltaQ::Constant(c),
            ("two_over_g", _) => DeltaQ::TwoOverG,
            ("linear_in_g", Some(a)) => DeltaQ::LinearInG(a),
            ("constant", None) | ("linear_in_g", None) => {
                return Err(PyValueError::new_err(format!(
                    "generator \"{kind}\" requires a coefficient"
                )))
            }
            (other, _) => {
                return Err(PyValueError::new_err(format!(
                    "unknown generator \"{other}\""
                )))
            }
        };
        apply_delta_q(&self.inner, level, &generator, override_node_guard)
            .map(|inner| PyPerturbation { inner })
            .map_err(value_err)
    }

    /// Independent check of the construction: discretizes the system's own
    /// mass and potential, solves for the lowest `k` eigenpairs, and
    /// reports energy gaps and state overlaps.
    #[pyo3(signature = (k,))]
    fn verify<'py>(&self, py: Python<'py>, k: usize) -> PyResult<Bound<'py, PyDict>> {
        let report = verify_system(&self.inner, k, &VerifyOptions::default()).map_err(value_err)?;
        let out = PyDict::new(py);
        out.set_item("all_pass", report.all_pass)?;
        let levels = PyList::empty(py);
        for level in &report.levels {
            let entry = PyDict::new(py);
            entry.set_item("n", level.n)?;
            entry.set_item("analytic_energy", level.analytic_energy)?;
            entry.set_item("numeric_energy", level.numeric_energy)?;
            entry.set_item("rel_gap", level.rel_gap)?;
            entry.set_item("overlap", level.overlap)?;
            entry.set_item("analytic_residual", level.analytic_residual)?;
            entry.set_item("pass", level.pass)?;
            levels.append(entry)?;
        }
        out.set_item("levels", levels)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "System(provenance={}, n_max={}, grid=[{}, {}] x {})",
            self.inner.provenance(),
            self.inner.n_max(),
            self.inner.grid().x_lo(),
            self.inner.grid().x_hi(),
            self.inner.grid().len()
        )
    }
}

/// Result of a ΔQ application: the moderating factor, the potential
/// modification, the energy shift, and the renormalized extended state.
#[pyclass(name = "Perturbation")]
struct PyPerturbation {
    inner: PerturbationResult,
}

#[pymethods]
impl PyPerturbation {
    #[getter]
    fn label(&self) -> String {
        self.inner.delta_q_label.clone()
    }

    #[getter]
    fn delta_e(&self) -> f64 {
        self.inner.delta_e
    }

    #[getter]
    fn delta_e_is_gauge(&self) -> bool {
        self.inner.delta_e_is_gauge
    }

    #[getter]
    fn h(&self) -> Vec<f64> {
        self.inner.h.clone()
    }

    #[getter]
    fn delta_v(&self) -> Vec<f64> {
        self.inner.delta_v.clone()
    }

    #[getter]
    fn psi_ext(&self) -> Vec<f64> {
        self.inner.psi_ext.clone()
    }

    #[getter]
    fn guarded_points(&self) -> Vec<usize> {
        self.inner.guarded_points.clone()
    }
}

/// Exponential-mass system `M = g = e^{−βx}` dressed with generalized
/// Laguerre states.
#[pyfunction]
#[pyo3(name = "construct_laguerre_exponential")]
fn py_construct_laguerre_exponential(
    beta: f64,
    nu: f64,
    n_max: usize,
    x_lo: f64,
    x_hi: f64,
    n_points: usize,
) -> PyResult<PySystem> {
    let grid = Grid1D::new(x_lo, x_hi, n_points).map_err(value_err)?;
    construct_laguerre_exponential(beta, nu, n_max, grid)
        .map(|inner| PySystem { inner })
        .map_err(value_err)
}

/// Constant-mass Hermite limit (`V = x²`, `E_n = 2n + 1`).
#[pyfunction]
#[pyo3(name = "construct_hermite_harmonic")]
fn py_construct_hermite_harmonic(
    n_max: usize,
    x_lo: f64,
    x_hi: f64,
    n_points: usize,
) -> PyResult<PySystem> {
    let grid = Grid1D::new(x_lo, x_hi, n_points).map_err(value_err)?;
    construct_hermite_harmonic(n_max, grid)
        .map(|inner| PySystem { inner })
        .map_err(value_err)
}

/// Generalized Laguerre polynomial `L_n^nu(g)`.
#[pyfunction]
fn laguerre(n: usize, nu: f64, g: f64) -> PyResult<f64> {
    specfam::laguerre(n, nu, g).map_err(value_err)
}

/// `d/dg L_n^nu(g)`.
#[pyfunction]
fn laguerre_dg(n: usize, nu: f64, g: f64) -> PyResult<f64> {
    specfam::laguerre_dg(n, nu, g).map_err(value_err)
}

/// Physicists' Hermite polynomial `H_n(g)`.
#[pyfunction]
fn hermite(n: usize, g: f64) -> f64 {
    specfam::hermite(n, g)
}

#[pymodule]
fn pdmforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyPerturbation>()?;
    m.add_function(wrap_pyfunction!(py_construct_laguerre_exponential, m)?)?;
    m.add_function(wrap_pyfunction!(py_construct_hermite_harmonic, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre_dg, m)?)?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    Ok(())
}
