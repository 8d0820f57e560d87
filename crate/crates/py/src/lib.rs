//! Python bindings: problems (presets or Python callables), the eight
//! schemes, comparisons, bounds, certification, stability runs and the
//! delay-equation solver.

// Python-facing functions mirror keyword-heavy signatures.
#![allow(clippy::too_many_arguments)]

use fixpoint_core::bounds::{bound_ratio, new_scheme_bound, picard_mann_bound, BoundInputs};
use fixpoint_core::contraction::estimate_weak_contraction;
use fixpoint_core::csvio::render_traces;
use fixpoint_core::delay::{self, method_of_steps_oracle, solve_dde};
use fixpoint_core::harness::{compare_schemes_with, stability_experiment, PerturbationSpec};
use fixpoint_core::problems::{delay_problem, scalar_problem, ScalarProblem};
use fixpoint_core::{
    iterate_with, DomainSpec, Error, IterationTrace, Point, Schedule as CoreSchedule, SchemeKind, SelfMap, Sequence,
    StepParams, Stopping,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyfixpoint, HypothesisError, PyValueError, "A hypothesis such as C5 does not hold.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Hypothesis(msg) => HypothesisError::new_err(msg),
        Error::Io(e) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_scheme(name: &str) -> PyResult<SchemeKind> {
    name.parse().map_err(to_py)
}

fn sequence(v: &Bound<'_, PyAny>) -> PyResult<Sequence> {
    if let Ok(c) = v.extract::<f64>() {
        return Sequence::constant(c).map_err(to_py);
    }
    if let Ok(s) = v.extract::<String>() {
        if s == "harmonic" {
            return Ok(Sequence::Harmonic);
        }
        return Err(PyValueError::new_err(format!("unknown sequence {s:?}")));
    }
    let values: Vec<f64> = v.extract()?;
    Sequence::table(values, false).map_err(to_py)
}

/// Step-size sequences α, β, γ: floats, "harmonic", or lists (last value repeats).
#[pyclass(frozen, name = "Schedule", from_py_object)]
#[derive(Clone)]
struct PySchedule {
    inner: CoreSchedule,
}

#[pymethods]
impl PySchedule {
    #[new]
    #[pyo3(signature = (alpha = None, beta = None, gamma = None))]
    fn new(
        alpha: Option<&Bound<'_, PyAny>>,
        beta: Option<&Bound<'_, PyAny>>,
        gamma: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        let seq = |v: Option<&Bound<'_, PyAny>>| v.map_or(Ok(Sequence::Constant(0.25)), sequence);
        Ok(Self {
            inner: CoreSchedule::new(seq(alpha)?, seq(beta)?, seq(gamma)?),
        })
    }

    /// `(alpha, beta, gamma)` at index `n`.
    fn at(&self, n: usize) -> (f64, f64, f64) {
        let p = self.inner.at(n);
        (p.alpha, p.beta, p.gamma)
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule(alpha={}, beta={}, gamma={})",
            self.inner.alpha, self.inner.beta, self.inner.gamma
        )
    }
}

fn schedule_or_default(s: Option<&PySchedule>) -> CoreSchedule {
    s.map_or_else(|| CoreSchedule::uniform(0.25).expect("0.25 is a valid step"), |s| s.inner.clone())
}

/// A scalar self-map on an interval.
#[pyclass(frozen, name = "Problem")]
struct PyProblem {
    inner: ScalarProblem,
}

#[pymethods]
impl PyProblem {
    /// Wraps a Python callable `f(x) -> float` on `[lo, hi]`.
    #[new]
    #[pyo3(signature = (func, lo, hi, x0, fixed_point = None, name = "custom".to_string()))]
    fn new(func: Py<PyAny>, lo: f64, hi: f64, x0: f64, fixed_point: Option<f64>, name: String) -> PyResult<Self> {
        let domain = DomainSpec::interval(lo, hi).map_err(to_py)?;
        let map = SelfMap::fallible(domain, move |x: &f64| {
            Python::attach(|py| {
                func.call1(py, (*x,))
                    .and_then(|v| v.extract::<f64>(py))
                    .map_err(|e| Error::InvalidArgument(format!("python map raised at x = {x}: {e}")))
            })
        });
        let map = match fixed_point {
            Some(p) => map.with_fixed_point(p).map_err(to_py)?,
            None => map,
        };
        if !map.contains(&x0) {
            return Err(PyValueError::new_err(format!("x0 = {x0} is outside [{lo}, {hi}]")));
        }
        Ok(Self {
            inner: ScalarProblem { name, map, x0 },
        })
    }

    /// Built-in problem: "cuberoot", "linear-<δ>", "identity", "translation".
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: scalar_problem(name).map_err(to_py)?,
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn x0(&self) -> f64 {
        self.inner.x0
    }

    #[getter]
    fn fixed_point(&self) -> Option<f64> {
        self.inner.map.fixed_point().copied()
    }

    fn __call__(&self, py: Python<'_>, x: f64) -> PyResult<f64> {
        let map = &self.inner.map;
        py.detach(|| map.eval(&x)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Problem({:?}, x0={})", self.inner.name, self.inner.x0)
    }
}

/// One scheme's recorded iterates.
#[pyclass(frozen, name = "Trace")]
struct PyTrace {
    inner: IterationTrace<f64>,
}

#[pymethods]
impl PyTrace {
    #[getter]
    fn scheme(&self) -> &'static str {
        self.inner.scheme.name()
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.x).collect()
    }

    #[getter]
    fn err(&self) -> Vec<Option<f64>> {
        self.inner.records.iter().map(|r| r.err).collect()
    }

    #[getter]
    fn residual(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.residual).collect()
    }

    #[getter]
    fn stop_reason(&self) -> String {
        self.inner.stop_reason.to_string()
    }

    #[getter]
    fn iterations_to_tol(&self) -> Option<usize> {
        self.inner.iterations_to_tol()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged()
    }

    /// The trace as CSV text (`n,scheme,x,err,residual`).
    fn to_csv(&self) -> PyResult<String> {
        render_traces([&self.inner]).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Trace({}, {} records, {})",
            self.inner.scheme,
            self.inner.records.len(),
            self.inner.stop_reason
        )
    }
}

fn stopping(full_run: bool) -> Stopping {
    if full_run {
        Stopping::FullRun
    } else {
        Stopping::AtTolerance
    }
}

#[pyfunction]
fn schemes() -> Vec<&'static str> {
    SchemeKind::ALL.iter().map(|k| k.name()).collect()
}

/// One update of `scheme` from `x`.
#[pyfunction]
#[pyo3(signature = (problem, scheme, x, alpha = 0.25, beta = 0.25, gamma = 0.25, index = 0))]
fn step(
    py: Python<'_>,
    problem: &PyProblem,
    scheme: &str,
    x: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    index: usize,
) -> PyResult<f64> {
    let kind = parse_scheme(scheme)?;
    let map = &problem.inner.map;
    py.detach(|| fixpoint_core::step(kind, &x, map, StepParams::new(index, alpha, beta, gamma)))
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (problem, scheme, schedule = None, tol = 1e-12, max_iter = 100, x0 = None, full_run = false))]
fn iterate(
    py: Python<'_>,
    problem: &PyProblem,
    scheme: &str,
    schedule: Option<&PySchedule>,
    tol: f64,
    max_iter: usize,
    x0: Option<f64>,
    full_run: bool,
) -> PyResult<PyTrace> {
    let kind = parse_scheme(scheme)?;
    let sched = schedule_or_default(schedule);
    let x0 = x0.unwrap_or(problem.inner.x0);
    let map = &problem.inner.map;
    let inner = py
        .detach(|| iterate_with(kind, map, &x0, &sched, tol, max_iter, stopping(full_run)))
        .map_err(to_py)?;
    Ok(PyTrace { inner })
}

/// Runs several schemes from the same start; returns `(traces, ordering)`.
#[pyfunction]
#[pyo3(signature = (problem, schemes = None, schedule = None, tol = 1e-12, max_iter = 100, full_run = false))]
fn compare(
    py: Python<'_>,
    problem: &PyProblem,
    schemes: Option<Vec<String>>,
    schedule: Option<&PySchedule>,
    tol: f64,
    max_iter: usize,
    full_run: bool,
) -> PyResult<(Vec<PyTrace>, Vec<&'static str>)> {
    let kinds = match schemes {
        None => SchemeKind::ALL.to_vec(),
        Some(names) => names.iter().map(|n| parse_scheme(n)).collect::<PyResult<_>>()?,
    };
    let sched = schedule_or_default(schedule);
    let (map, x0) = (&problem.inner.map, problem.inner.x0);
    let report = py
        .detach(|| compare_schemes_with(&kinds, map, &x0, &sched, tol, max_iter, stopping(full_run)))
        .map_err(to_py)?;
    let ordering = report.ordering.iter().map(|k| k.name()).collect();
    let traces = report.runs.into_iter().map(|r| PyTrace { inner: r.trace }).collect();
    Ok((traces, ordering))
}

/// `(new_scheme_bound, picard_mann_bound, bound_ratio)` at index `n`.
#[pyfunction]
#[pyo3(signature = (delta, n, alpha = 0.25, beta = 0.25, initial_err = 1.0))]
fn bounds(delta: f64, n: usize, alpha: f64, beta: f64, initial_err: f64) -> PyResult<(f64, f64, f64)> {
    let inp = BoundInputs::new(
        delta,
        Sequence::constant(alpha).map_err(to_py)?,
        Sequence::constant(beta).map_err(to_py)?,
        initial_err,
        n,
    )
    .map_err(to_py)?;
    Ok((new_scheme_bound(&inp), picard_mann_bound(&inp), bound_ratio(&inp)))
}

/// Sampled estimate of the weak-contraction constants.
#[pyfunction]
#[pyo3(signature = (problem, samples = 10_000, seed = 0, l_grid = vec![0.0]))]
fn certify<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    samples: usize,
    seed: u64,
    l_grid: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let map = &problem.inner.map;
    let est = py
        .detach(|| estimate_weak_contraction(map, samples, seed, &l_grid))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("delta_hat", est.delta_hat)?;
    d.set_item("l_hat", est.l_hat)?;
    d.set_item("per_l", est.per_l)?;
    d.set_item("max_violation", est.max_violation)?;
    d.set_item("certified", est.certified)?;
    d.set_item("samples", est.samples)?;
    d.set_item("seed", est.sampler_seed)?;
    Ok(d)
}

/// Perturbed new-scheme run; `kind` is "decaying" (c/(n+1)^q) or "constant".
#[pyfunction]
#[pyo3(signature = (problem, kind = "decaying", c = 0.1, q = 2.0, horizon = 200, schedule = None))]
fn stability<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    kind: &str,
    c: f64,
    q: f64,
    horizon: usize,
    schedule: Option<&PySchedule>,
) -> PyResult<Bound<'py, PyDict>> {
    let pert = match kind {
        "decaying" => PerturbationSpec::Decaying { c, q },
        "constant" => PerturbationSpec::Constant { c },
        _ => return Err(PyValueError::new_err(format!("unknown perturbation {kind:?}"))),
    };
    let sched = schedule_or_default(schedule);
    let (map, x0) = (&problem.inner.map, problem.inner.x0);
    let rep = py
        .detach(|| stability_experiment(map, &x0, &sched, pert, horizon))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("z", rep.records.iter().map(|r| r.z).collect::<Vec<_>>())?;
    d.set_item("eps", rep.records.iter().map(|r| r.eps).collect::<Vec<_>>())?;
    d.set_item("err", rep.records.iter().map(|r| r.err).collect::<Vec<_>>())?;
    d.set_item("tail_start", rep.tail_start)?;
    d.set_item("tail_err_max", rep.tail_err_max)?;
    d.set_item("tail_err_min", rep.tail_err_min)?;
    d.set_item("verdict_forward", rep.verdict_forward)?;
    d.set_item("verdict_converse", rep.verdict_converse)?;
    d.set_item("diverged", rep.diverged)?;
    Ok(d)
}

/// Solves a delay preset on `[t0, b]` and compares with the reference solver.
#[pyfunction]
#[pyo3(signature = (problem = "negfeedback", t0 = 0.0, b = 0.45, h = 0.01, tol = 1e-12, max_iter = 100))]
fn dde<'py>(
    py: Python<'py>,
    problem: &str,
    t0: f64,
    b: f64,
    h: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let prob = delay_problem(problem, t0, b).map_err(to_py)?;
    let sched = CoreSchedule::uniform(0.25).expect("0.25 is a valid step");
    let (sol, oracle) = py
        .detach(|| Ok::<_, Error>((solve_dde(&prob, h, &sched, tol, max_iter)?, method_of_steps_oracle(&prob, h)?)))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t", sol.solution.iter().map(|(t, _)| t).collect::<Vec<_>>())?;
    d.set_item("x", sol.solution.values.clone())?;
    d.set_item("x_ref", oracle.values.clone())?;
    d.set_item("sup_error", sol.solution.distance(&oracle))?;
    d.set_item("converged", sol.converged)?;
    d.set_item("iterations", sol.trace.last().n)?;
    d.set_item("c5", prob.c5_value())?;
    d.set_item("conditions", sol.report.to_string())?;
    Ok(d)
}

/// Running trapezoid integral of equally spaced samples.
#[pyfunction]
fn cumulative_trapezoid(values: Vec<f64>, h: f64) -> Vec<f64> {
    delay::cumulative_trapezoid(&values, h)
}

#[pymodule]
fn pyfixpoint(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyTrace>()?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    m.add_function(wrap_pyfunction!(schemes, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(dde, m)?)?;
    m.add_function(wrap_pyfunction!(cumulative_trapezoid, m)?)?;
    Ok(())
}
