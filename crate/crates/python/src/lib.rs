//! Python bindings: loops, embeddings, push-off, functionals, the reduced linear
//! system and the coincidence solver.

use loopbu_core::coincidence::{
    solve_bu, CoincidenceCertificate, Embedding, OddMapProblem, SolveError, SolverConfig,
};
use loopbu_core::embeddings::{self, TfSphereParams};
use loopbu_core::functionals::{self, Component, DEFAULT_KERNEL_TOL};
use loopbu_core::io;
use loopbu_core::loop_core::{self, PushoffArcs, DEFAULT_TF_TOL};
use loopbu_core::sphere_geom::SpherePoint;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(loopbu, NoConvergence, PyRuntimeError);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn equatorial(x: Vec<f64>) -> PyResult<SpherePoint> {
    let p = SpherePoint::new(x).map_err(value_err)?;
    if !p.is_equatorial() {
        return Err(PyValueError::new_err(
            "x must lie on the equator (last coordinate 0)",
        ));
    }
    Ok(p)
}

/// A sampled closed path on `S^n` or in `R^n`.
#[pyclass(name = "Loop", module = "loopbu", frozen)]
struct PyLoop {
    inner: loop_core::Loop,
}

#[pymethods]
impl PyLoop {
    #[new]
    #[pyo3(signature = (samples, base, sphere=true))]
    fn new(samples: Vec<Vec<f64>>, base: Vec<f64>, sphere: bool) -> PyResult<Self> {
        let dim = base.len();
        let manifold = if sphere {
            loop_core::Manifold::Sphere(dim.saturating_sub(1))
        } else {
            loop_core::Manifold::Euclidean(dim)
        };
        let inner = loop_core::Loop::new(manifold, samples, base).map_err(value_err)?;
        Ok(PyLoop { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = io::loop_from_json(text).map_err(value_err)?;
        Ok(PyLoop { inner })
    }

    fn to_json(&self) -> String {
        io::loop_to_json(&self.inner)
    }

    #[getter]
    fn samples(&self) -> Vec<Vec<f64>> {
        self.inner.samples().to_vec()
    }

    #[getter]
    fn base(&self) -> Vec<f64> {
        self.inner.base().to_vec()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.manifold().n()
    }

    #[getter]
    fn is_sphere(&self) -> bool {
        self.inner.manifold().is_sphere()
    }

    /// The reversed loop `t ↦ α(1 − t)`.
    fn star(&self) -> Self {
        PyLoop {
            inner: self.inner.star(),
        }
    }

    fn tf_distance(&self) -> f64 {
        self.inner.tf_distance()
    }

    #[pyo3(signature = (tol=DEFAULT_TF_TOL))]
    fn is_tf(&self, tol: f64) -> bool {
        self.inner.is_tf(tol)
    }

    fn eval(&self, t: f64) -> PyResult<Vec<f64>> {
        self.inner.eval(t).map_err(value_err)
    }

    fn __len__(&self) -> usize {
        self.inner.m() + 1
    }

    fn __repr__(&self) -> String {
        let kind = if self.inner.manifold().is_sphere() {
            "S"
        } else {
            "R"
        };
        format!(
            "Loop({kind}^{}, m={}, tf_distance={:.3e})",
            self.inner.manifold().n(),
            self.inner.m(),
            self.inner.tf_distance()
        )
    }
}

fn wrap(inner: loop_core::Loop) -> PyLoop {
    PyLoop { inner }
}

#[pyfunction]
#[pyo3(signature = (x, m=256))]
fn embed_alpha(x: Vec<f64>, m: usize) -> PyResult<PyLoop> {
    embeddings::embed_alpha(&equatorial(x)?, m)
        .map(wrap)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (x, m=256, rotate=false))]
fn embed_beta(x: Vec<f64>, m: usize, rotate: bool) -> PyResult<PyLoop> {
    embeddings::embed_beta(&equatorial(x)?, m, rotate)
        .map(wrap)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (x, lam, m=256))]
fn h_lambda(x: Vec<f64>, lam: f64, m: usize) -> PyResult<PyLoop> {
    embeddings::h_lambda(&equatorial(x)?, lam, m)
        .map(wrap)
        .map_err(value_err)
}

#[pyfunction]
fn embed_gamma(omega: &PyLoop, x: Vec<f64>) -> PyResult<PyLoop> {
    embeddings::embed_gamma(&omega.inner, &equatorial(x)?)
        .map(wrap)
        .map_err(value_err)
}

/// To-and-fro loop `ω_c` for a point `c` of `S^d`, `d = len(c) − 1`.
#[pyfunction]
#[pyo3(signature = (c, n, m=256))]
fn tf_sphere_embed(c: Vec<f64>, n: usize, m: usize) -> PyResult<PyLoop> {
    if c.is_empty() {
        return Err(PyValueError::new_err("c needs at least one coordinate"));
    }
    let params = TfSphereParams::sine(c.len() - 1);
    embeddings::tf_sphere_embed(&c, &params, n, m)
        .map(wrap)
        .map_err(value_err)
}

/// `α_{sμ}`; arcs are the quarter meridians towards `±mu` (default `±e_1`).
#[pyfunction]
#[pyo3(signature = (alpha, s=1.0, mu=None))]
fn pushoff(alpha: &PyLoop, s: f64, mu: Option<Vec<f64>>) -> PyResult<PyLoop> {
    let arcs = match mu {
        Some(x) => PushoffArcs::meridians_through(&equatorial(x)?).map_err(value_err)?,
        None => PushoffArcs::quarter_meridians(alpha.inner.manifold().n()),
    };
    loop_core::pushoff_homotopy(&alpha.inner, s, &arcs)
        .map(wrap)
        .map_err(value_err)
}

/// A vector of integral functionals on loops.
#[pyclass(name = "FunctionalSpec", module = "loopbu", frozen)]
struct PyFunctionalSpec {
    inner: functionals::FunctionalSpec,
}

#[pymethods]
impl PyFunctionalSpec {
    /// One `∫‖α − β_j‖²` component per path.
    #[staticmethod]
    fn squared_distance(betas: Vec<Vec<Vec<f64>>>) -> PyResult<Self> {
        let components = betas
            .into_iter()
            .map(|beta| Component::SquaredDistanceToPath { beta })
            .collect();
        let inner = functionals::FunctionalSpec::new(components).map_err(value_err)?;
        Ok(PyFunctionalSpec { inner })
    }

    /// A single `∫ w(t) α_axis(t)` component.
    #[staticmethod]
    fn weighted_coordinate(axis: usize, weights: Vec<f64>) -> PyResult<Self> {
        let inner =
            functionals::FunctionalSpec::new(vec![Component::WeightedCoordinate { axis, weights }])
                .map_err(value_err)?;
        Ok(PyFunctionalSpec { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, m, base_dir="."))]
    fn from_toml(text: &str, m: usize, base_dir: &str) -> PyResult<Self> {
        let inner =
            io::spec_from_toml(text, std::path::Path::new(base_dir), m).map_err(value_err)?;
        Ok(PyFunctionalSpec { inner })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn eval(&self, alpha: &PyLoop) -> PyResult<Vec<f64>> {
        functionals::eval_f(&self.inner, &alpha.inner).map_err(value_err)
    }

    /// `f(α) − f(α*)`.
    fn gap(&self, alpha: &PyLoop) -> PyResult<Vec<f64>> {
        functionals::coincidence_gap(&self.inner, &alpha.inner).map_err(value_err)
    }
}

#[pyclass(name = "Certificate", module = "loopbu", frozen)]
struct PyCertificate {
    inner: CoincidenceCertificate,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.coords().to_vec()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn tf_distance(&self) -> f64 {
        self.inner.tf_distance
    }

    #[getter]
    fn g_norm(&self) -> f64 {
        self.inner.g_norm
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.as_str()
    }

    #[getter(loop_)]
    fn loop_(&self) -> PyLoop {
        wrap(self.inner.loop_.clone())
    }

    fn to_json(&self) -> String {
        io::certificate_to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(x={:?}, residual={:.3e}, method={})",
            self.inner.x.coords(),
            self.inner.residual,
            self.inner.method.as_str()
        )
    }
}

/// Solves `f(e(x)) = f(e(−x))` on the equator of `S^n`.
///
/// `omega` selects the γ embedding; without it the great circles `α` are used.
/// Raises `NoConvergence` when the search stalls.
#[pyfunction]
#[pyo3(signature = (spec, n, omega=None, tol=1e-8, iters=100, grid_points=4096, best_effort=false))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    spec: &PyFunctionalSpec,
    n: usize,
    omega: Option<&PyLoop>,
    tol: f64,
    iters: usize,
    grid_points: usize,
    best_effort: bool,
) -> PyResult<PyCertificate> {
    let embedding = match omega {
        Some(o) => Embedding::Gamma(o.inner.clone()),
        None => Embedding::Alpha,
    };
    let problem =
        OddMapProblem::new(spec.inner.clone(), embedding, n, spec.inner.m()).map_err(value_err)?;
    let config = SolverConfig {
        tol,
        iters,
        grid_points,
        best_effort,
        ..SolverConfig::default()
    };
    match py.detach(|| solve_bu(&problem, &config)) {
        Ok(inner) => Ok(PyCertificate { inner }),
        Err(SolveError::NoConvergence(c)) => Err(NoConvergence::new_err(format!(
            "best candidate x = {:?} has |g| = {:e}",
            c.x.coords(),
            c.g_norm
        ))),
        Err(SolveError::Problem(e)) => Err(value_err(e)),
    }
}

/// Matrix of the reduced homogeneous system for paths `betas` and `basis` sine modes.
#[pyfunction]
#[pyo3(signature = (betas, basis=4))]
fn reduced_matrix(betas: Vec<Vec<Vec<f64>>>, basis: usize) -> PyResult<Vec<Vec<f64>>> {
    let system = functionals::build_reduced_system(&betas, basis).map_err(value_err)?;
    let mat = system.matrix();
    Ok((0..mat.nrows())
        .map(|r| mat.row(r).iter().copied().collect())
        .collect())
}

/// Kernel vectors of the reduced system and the loops `α_x` built from them.
///
/// Returns `(kernel, loops)`; the paths must share the loop grid `m`.
#[pyfunction]
#[pyo3(signature = (betas, basis=4, tol=DEFAULT_KERNEL_TOL))]
fn linear_family(
    betas: Vec<Vec<Vec<f64>>>,
    basis: usize,
    tol: f64,
) -> PyResult<(Vec<Vec<f64>>, Vec<PyLoop>)> {
    let system = functionals::build_reduced_system(&betas, basis).map_err(value_err)?;
    let m = betas[0].len() - 1;
    let kernel = functionals::null_space(&system, tol);
    let loops = kernel
        .iter()
        .map(|v| functionals::build_alpha_x(v, &system, m).map(wrap))
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_err)?;
    Ok((kernel, loops))
}

#[pymodule]
fn loopbu(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLoop>()?;
    m.add_class::<PyFunctionalSpec>()?;
    m.add_class::<PyCertificate>()?;
    m.add("NoConvergence", m.py().get_type::<NoConvergence>())?;
    m.add_function(wrap_pyfunction!(embed_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(embed_beta, m)?)?;
    m.add_function(wrap_pyfunction!(h_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(embed_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(tf_sphere_embed, m)?)?;
    m.add_function(wrap_pyfunction!(pushoff, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(linear_family, m)?)?;
    Ok(())
}
