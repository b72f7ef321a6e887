//! Python module `worldline_lab`: metrics, jets, equation models, integration
//! and the closed-form helical worldlines.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use worldline_lab::dynamics::{self, EquationId, EquationModel, ModelParams};
use worldline_lab::frenet::{self, ParamKind};
use worldline_lab::integrate::{self, IntegratorConfig, Method, Projection};
use worldline_lab::worldline::{self, HelixParams};
use worldline_lab::{Error, MetricSpace, Vector};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Stiffness { .. } | Error::StepLimit { .. } | Error::Resolution(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn vecs(v: &[Vec<f64>]) -> Vec<Vector> {
    v.iter().map(|c| Vector::upper(c)).collect()
}

fn comps(v: &Vector) -> Vec<f64> {
    v.components().to_vec()
}

#[pyclass(name = "Metric", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyMetric(MetricSpace);

#[pymethods]
impl PyMetric {
    #[new]
    #[pyo3(signature = (signature, orientation = 1.0))]
    fn new(signature: Vec<f64>, orientation: f64) -> PyResult<Self> {
        MetricSpace::new(&signature, orientation).map(PyMetric).map_err(py_err)
    }

    #[staticmethod]
    fn minkowski() -> Self {
        PyMetric(MetricSpace::minkowski())
    }

    #[staticmethod]
    fn euclidean(dim: usize) -> Self {
        PyMetric(MetricSpace::euclidean(dim))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn signature(&self) -> Vec<f64> {
        self.0.signature().to_vec()
    }

    fn dot(&self, a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
        self.0.inner(&Vector::upper(&a), &Vector::upper(&b)).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Metric({:?})", self.0.signature())
    }
}

/// Position plus derivatives `[u, u̇, …]`; `natural` marks arc-length data.
#[pyclass(name = "Jet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyJet(frenet::Jet);

#[pymethods]
impl PyJet {
    #[new]
    #[pyo3(signature = (x, derivs, natural = true))]
    fn new(x: Vec<f64>, derivs: Vec<Vec<f64>>, natural: bool) -> PyResult<Self> {
        let kind = if natural { ParamKind::Natural } else { ParamKind::Generic };
        frenet::Jet::new(Vector::upper(&x), &vecs(&derivs), kind).map(PyJet).map_err(py_err)
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        comps(&self.0.x)
    }

    #[getter]
    fn derivs(&self) -> Vec<Vec<f64>> {
        self.0.derivs().iter().map(comps).collect()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    fn curvature(&self, metric: &PyMetric) -> PyResult<f64> {
        frenet::curvature(&self.0, &metric.0).map_err(py_err)
    }

    fn torsion(&self, metric: &PyMetric) -> PyResult<f64> {
        frenet::torsion(&self.0, &metric.0).map_err(py_err)
    }

    fn natural_residual(&self, metric: &PyMetric) -> f64 {
        self.0.max_natural_residual(&metric.0)
    }
}

#[pyclass(name = "Model", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyModel(EquationModel);

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (equation, metric, m = 0.0, m0 = 0.0, sigma = None, omega2 = 0.0, a = 0.0))]
    fn new(
        equation: &str,
        metric: &PyMetric,
        m: f64,
        m0: f64,
        sigma: Option<Vec<f64>>,
        omega2: f64,
        a: f64,
    ) -> PyResult<Self> {
        let id = EquationId::parse(equation).map_err(py_err)?;
        let p = ModelParams { m, m0, sigma: sigma.map(|s| Vector::upper(&s)), omega2, a };
        EquationModel::new(id, metric.0, p).map(PyModel).map_err(py_err)
    }

    #[getter]
    fn equation(&self) -> &'static str {
        self.0.id.name()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    fn resolve_highest(&self, jet: &PyJet) -> PyResult<Vec<f64>> {
        self.0.resolve_highest(&jet.0).map(|v| comps(&v)).map_err(py_err)
    }

    fn invariant(&self, name: &str, jet: &PyJet) -> PyResult<f64> {
        dynamics::invariant(name, &jet.0, &self.0.params, &self.0.metric).map_err(py_err)
    }
}

#[pyclass(name = "Trajectory", frozen, skip_from_py_object)]
struct PyTrajectory(integrate::Trajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn s(&self) -> Vec<f64> {
        self.0.samples.iter().map(|x| x.s).collect()
    }

    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        self.0.samples.iter().map(|x| comps(&x.jet.x)).collect()
    }

    #[getter]
    fn drift_report(&self) -> BTreeMap<String, f64> {
        self.0.drift_report.clone()
    }

    #[getter]
    fn constraint_drift(&self) -> Option<f64> {
        self.0.constraint_drift
    }

    #[getter]
    fn accepted_steps(&self) -> usize {
        self.0.accepted_steps
    }

    fn trace(&self, name: &str) -> PyResult<Vec<f64>> {
        self.0.trace(name).map_err(py_err)
    }

    fn position_at(&self, s: f64) -> PyResult<Vec<f64>> {
        self.0.position_at(s).map(|v| comps(&v)).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.samples.len()
    }
}

#[pyfunction]
#[pyo3(name = "integrate", signature = (model, jet, span, tol = 1e-10, method = "dp54", max_step = 0.05, renormalize = false))]
fn py_integrate(
    model: &PyModel,
    jet: &PyJet,
    span: (f64, f64),
    tol: f64,
    method: &str,
    max_step: f64,
    renormalize: bool,
) -> PyResult<PyTrajectory> {
    let method = match method {
        "dp54" => Method::Dp54,
        "rk4" => Method::Rk4,
        other => return Err(PyValueError::new_err(format!("unknown method '{other}' (dp54, rk4)"))),
    };
    let projection = if renormalize { Projection::RenormalizeVelocity } else { Projection::None };
    let cfg = IntegratorConfig { method, abs_tol: tol, rel_tol: tol, max_step, projection };
    integrate::integrate(&model.0, &jet.0, span, &cfg).map(PyTrajectory).map_err(py_err)
}

/// Max distance between two trajectories over their common span.
#[pyfunction]
fn compare(a: &PyTrajectory, b: &PyTrajectory) -> PyResult<f64> {
    integrate::compare(&a.0, &b.0).map_err(py_err)
}

#[pyclass(name = "Helix", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyHelix(HelixParams);

#[pymethods]
impl PyHelix {
    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega
    }

    #[getter]
    fn u0(&self) -> Vec<f64> {
        comps(&self.0.u0)
    }

    #[getter]
    fn a(&self) -> Vec<f64> {
        comps(&self.0.a)
    }

    fn position(&self, s: f64) -> Vec<f64> {
        comps(&self.0.position(s))
    }

    fn jet(&self, s: f64, order: usize) -> PyResult<PyJet> {
        self.0.eval(s, order).map(PyJet).map_err(py_err)
    }

    fn residual(&self) -> f64 {
        self.0.residuals().max()
    }
}

#[pyfunction]
fn solve_appendix(alpha: f64, v: [f64; 3], omega: f64) -> PyResult<PyHelix> {
    worldline::solve_appendix(alpha, v, omega).map(PyHelix).map_err(py_err)
}

#[pyfunction]
fn figure(n: u8) -> PyResult<PyHelix> {
    worldline::figure_scenario(n).and_then(|f| f.params()).map(PyHelix).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "worldline_lab")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetric>()?;
    m.add_class::<PyJet>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyHelix>()?;
    m.add_function(wrap_pyfunction!(py_integrate, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(solve_appendix, m)?)?;
    m.add_function(wrap_pyfunction!(figure, m)?)?;
    Ok(())
}
