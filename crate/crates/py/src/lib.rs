//! Python bindings: graph systems, (1,k)-graphs, walks, the solver and the
//! verifiers. Reports come back as plain dicts, rationals as fraction strings.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use rainbow_core::arith::{parse_ratio, Ratio};
use rainbow_core::framework::{pipeline_vicinity_to_framework, verify_framework as core_verify_framework, FrameworkOptions};
use rainbow_core::hypergraph as hg;
use rainbow_core::io::Instance;
use rainbow_core::matching::{max_fractional_matching_with, uniform_weights, Arithmetic};
use rainbow_core::sequential as seq;
use rainbow_core::{instances, solver, vicinity};

create_exception!(rainbow_hamilton, RainbowError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    RainbowError::new_err(e.to_string())
}

/// Accepts "5/9", "0.01" or any number whose str() parses exactly.
fn ratio_of(obj: &Bound<'_, PyAny>) -> PyResult<Ratio> {
    parse_ratio(&obj.str()?.to_string()).map_err(err)
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "GraphSystem", module = "rainbow_hamilton")]
pub struct PyGraphSystem {
    inner: hg::GraphSystem,
}

#[pymethods]
impl PyGraphSystem {
    /// One edge list per color; there must be as many colors as points.
    #[new]
    fn new(k: usize, graphs: Vec<Vec<Vec<usize>>>) -> PyResult<Self> {
        let n = graphs.len();
        let inst = Instance { n, k, graphs, meta: None };
        Ok(Self { inner: inst.to_system().map_err(err)? })
    }

    #[staticmethod]
    fn complete(n: usize, k: usize) -> PyResult<Self> {
        Ok(Self { inner: instances::complete_system(n, k).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, k, target, seed=0))]
    fn random(n: usize, k: usize, target: &Bound<'_, PyAny>, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: instances::random_system(n, k, &ratio_of(target)?, seed).map_err(err)? })
    }

    #[staticmethod]
    fn xy_obstruction(n: usize, x_size: usize) -> PyResult<Self> {
        Ok(Self { inner: instances::xy_obstruction(n, x_size).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inst = rainbow_core::io::parse_instance(text).map_err(err)?;
        Ok(Self { inner: inst.to_system().map_err(err)? })
    }

    fn to_json(&self) -> String {
        Instance::from_system(&self.inner, None).to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn edges(&self, color: usize) -> PyResult<Vec<Vec<usize>>> {
        self.inner.graphs().get(color).map(|g| g.edges().to_vec()).ok_or_else(|| err("color out of range"))
    }

    /// Minimum relative d-degree over all colors.
    fn min_degree<'py>(&self, py: Python<'py>, d: usize) -> PyResult<Bound<'py, PyAny>> {
        let (_, report) = self.inner.min_degree(d).map_err(err)?;
        to_py(py, &report)
    }

    fn to_onek(&self) -> PyOneKGraph {
        PyOneKGraph { inner: hg::system_to_onek(&self.inner) }
    }

    fn __repr__(&self) -> String {
        format!("GraphSystem(n={}, k={})", self.inner.n(), self.inner.k())
    }
}

#[pyclass(name = "OneKGraph", module = "rainbow_hamilton")]
pub struct PyOneKGraph {
    inner: hg::OneKGraph,
}

#[pymethods]
impl PyOneKGraph {
    /// `graphs[c]` lists the point sets paired with color c.
    #[new]
    fn new(n: usize, k: usize, graphs: Vec<Vec<Vec<usize>>>) -> PyResult<Self> {
        let inst = Instance { n, k, graphs, meta: None };
        Ok(Self { inner: inst.to_onek().map_err(err)? })
    }

    #[staticmethod]
    fn complete(colors: usize, n: usize, k: usize) -> Self {
        Self { inner: hg::OneKGraph::complete(colors, n, k) }
    }

    #[getter]
    fn colors(&self) -> usize {
        self.inner.colors()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn __len__(&self) -> usize {
        self.inner.edge_count()
    }

    fn contains(&self, color: usize, points: Vec<usize>) -> bool {
        self.inner.contains_unordered(color, &points)
    }

    fn to_json(&self) -> String {
        Instance::from_onek(&self.inner, None).to_json()
    }
}

#[pyclass(name = "SeqWalk", module = "rainbow_hamilton")]
pub struct PySeqWalk {
    inner: seq::SeqWalk,
}

#[pymethods]
impl PySeqWalk {
    #[new]
    #[pyo3(signature = (colors, points, closed=false))]
    fn new(colors: Vec<usize>, points: Vec<usize>, closed: bool) -> Self {
        let inner = if closed { seq::SeqWalk::closed(colors, points) } else { seq::SeqWalk::open(colors, points) };
        Self { inner }
    }

    #[getter]
    fn colors(&self) -> Vec<usize> {
        self.inner.colors.clone()
    }

    #[getter]
    fn points(&self) -> Vec<usize> {
        self.inner.points.clone()
    }

    #[getter]
    fn closed(&self) -> bool {
        self.inner.closed
    }

    fn is_rainbow(&self) -> bool {
        self.inner.is_rainbow()
    }

    /// Every window is an edge of its color in `g`.
    fn is_valid_in(&self, g: PyRef<'_, PyOneKGraph>) -> PyResult<bool> {
        Ok(seq::validate(&g.inner, &self.inner).map_err(err)?.is_valid())
    }

    fn shorten(&self, g: PyRef<'_, PyOneKGraph>) -> PyResult<Self> {
        Ok(Self { inner: seq::shorten_walk(&g.inner, &self.inner).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SeqWalk(colors={:?}, points={:?}, closed={})", self.inner.colors, self.inner.points, self.inner.closed)
    }
}

/// Exact search unless `exact` is false; returns `{status, cycle, nodes}`.
#[pyfunction]
#[pyo3(signature = (system, exact=true, seed=0, node_limit=None, jobs=1))]
fn solve<'py>(
    py: Python<'py>,
    system: PyRef<'_, PyGraphSystem>,
    exact: bool,
    seed: u64,
    node_limit: Option<u64>,
    jobs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = solver::SearchConfig { exact, seed, node_limit, jobs: jobs.max(1), ..Default::default() };
    let sys = system.inner.clone();
    let out = py.detach(move || solver::find_rainbow_hamilton(&sys, &cfg)).map_err(err)?;
    to_py(py, &out)
}

#[pyfunction]
fn verify_hamilton(system: PyRef<'_, PyGraphSystem>, cycle: PyRef<'_, PySeqWalk>) -> bool {
    solver::verify_hamilton(&system.inner, &cycle.inner)
}

/// Maximum fractional matching of a k-graph under unit vertex capacities.
#[pyfunction]
#[pyo3(signature = (n, k, edges, exact=true))]
fn max_fractional_matching<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
    exact: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let g = hg::KGraph::new(n, k, edges).map_err(err)?;
    let arith = if exact { Arithmetic::Exact } else { Arithmetic::Float };
    let m = max_fractional_matching_with(&g, &uniform_weights(n), arith).map_err(err)?;
    to_py(py, &m)
}

#[pyfunction]
fn verify_vicinity<'py>(
    py: Python<'py>,
    h: PyRef<'_, PyOneKGraph>,
    gamma: &Bound<'_, PyAny>,
    delta: &Bound<'_, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let family = vicinity::build_max_vicinity(&h.inner).map_err(err)?;
    let report = vicinity::verify_vicinity(&h.inner, &family, &ratio_of(gamma)?, &ratio_of(delta)?).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn verify_framework<'py>(
    py: Python<'py>,
    h: PyRef<'_, PyOneKGraph>,
    alpha: &Bound<'_, PyAny>,
    gamma: &Bound<'_, PyAny>,
    delta: &Bound<'_, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let (a, g, d) = (ratio_of(alpha)?, ratio_of(gamma)?, ratio_of(delta)?);
    let report = core_verify_framework(&h.inner, &a, &g, &d, &FrameworkOptions::default()).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn pipeline<'py>(
    py: Python<'py>,
    h: PyRef<'_, PyOneKGraph>,
    alpha: &Bound<'_, PyAny>,
    gamma: &Bound<'_, PyAny>,
    delta: &Bound<'_, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let (a, g, d) = (ratio_of(alpha)?, ratio_of(gamma)?, ratio_of(delta)?);
    let (_, report) =
        pipeline_vicinity_to_framework(&h.inner, None, &a, &g, &d, &FrameworkOptions::default()).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn check_x_trap<'py>(py: Python<'py>, system: PyRef<'_, PyGraphSystem>, x: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &instances::check_x_trap(&system.inner, &x).map_err(err)?)
}

/// Builds the canonical gadget for uniformity k, verifies it and absorbs (T, O).
#[pyfunction]
#[pyo3(signature = (k=3, budget=10_000_000))]
fn absorb_gadget<'py>(py: Python<'py>, k: usize, budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let inst = solver::gadget_absorption_instance(k).map_err(err)?;
    let report = solver::verify_absorbing_gadget(&inst.graph, &inst.gadget, &inst.t, &inst.o).map_err(err)?;
    let q = solver::AbsorptionQuery { path: inst.path.clone(), points: inst.t.clone(), colors: inst.o.clone() };
    let outcome = solver::check_absorbing_path(&inst.graph, &q, budget).map_err(err)?;
    to_py(py, &serde_json::json!({"report": report, "absorption": outcome}))
}

#[pymodule]
fn rainbow_hamilton(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RainbowError", m.py().get_type::<RainbowError>())?;
    m.add_class::<PyGraphSystem>()?;
    m.add_class::<PyOneKGraph>()?;
    m.add_class::<PySeqWalk>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_hamilton, m)?)?;
    m.add_function(wrap_pyfunction!(max_fractional_matching, m)?)?;
    m.add_function(wrap_pyfunction!(verify_vicinity, m)?)?;
    m.add_function(wrap_pyfunction!(verify_framework, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(check_x_trap, m)?)?;
    m.add_function(wrap_pyfunction!(absorb_gadget, m)?)?;
    Ok(())
}
