//! Python bindings. Instances and solutions are wrapped; everything else
//! crosses the boundary as plain lists, tuples, dicts and JSON strings.

use entround_core::binpack::{self, PackingConfig, ProblemKind};
use entround_core::covering::solve_pattern_lp as lp;
use entround_core::discrepancy::{self, HalfColoringMode};
use entround_core::harness::{self, ExperimentConfig, LoadedInstance, SizeDistribution};
use entround_core::matrix::{DenseMatrix, DiscrepancyBounds};
use entround_core::oracles::knapsack_select;
use entround_core::rounding::{self, Backend, RoundingConfig, RoundingInstance};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<f64>>, m: usize) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows, m).map_err(value_err)
}

fn backend(name: &str) -> PyResult<Backend> {
    match name {
        "exhaustive" => Ok(Backend::Exhaustive),
        "sdp" => Ok(Backend::Sdp),
        _ => Err(PyValueError::new_err(format!("unknown backend '{name}'"))),
    }
}

#[pyclass(name = "PackingInstance", module = "entround", frozen)]
struct PyPackingInstance {
    inner: binpack::PackingInstance,
}

#[pymethods]
impl PyPackingInstance {
    /// Sizes must be sorted non-increasing; give at most one of the optional lists.
    #[new]
    #[pyo3(signature = (sizes, rejection_costs=None, positions=None))]
    fn new(
        sizes: Vec<f64>,
        rejection_costs: Option<Vec<f64>>,
        positions: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let inner =
            binpack::PackingInstance::new(sizes, rejection_costs, positions).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Parses the JSON instance format; unsorted sizes are sorted.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match harness::parse_instance(text).map_err(value_err)? {
            LoadedInstance::Packing { instance, .. } => Ok(Self { inner: instance }),
            LoadedInstance::Rounding(_) => Err(PyValueError::new_err("not a packing instance")),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (kind, n, seed=0, distribution="uniform"))]
    fn generate(kind: &str, n: usize, seed: u64, distribution: &str) -> PyResult<Self> {
        let kind: ProblemKind = kind.parse().map_err(value_err)?;
        let dist: SizeDistribution = distribution.parse().map_err(value_err)?;
        let inner = harness::generate_instance(kind, n, seed, dist).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        let file = harness::InstanceFile::from_instance(&self.inner, Default::default());
        serde_json::to_string_pretty(&file).expect("instance serializes")
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn sizes(&self) -> Vec<f64> {
        self.inner.sizes().to_vec()
    }

    #[getter]
    fn rejection_costs(&self) -> Option<Vec<f64>> {
        self.inner.rejection_costs().map(<[f64]>::to_vec)
    }

    #[getter]
    fn positions(&self) -> Option<Vec<f64>> {
        self.inner.positions().map(<[f64]>::to_vec)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!(
            "PackingInstance(kind={}, n={})",
            self.inner.kind(),
            self.inner.n()
        )
    }
}

#[pyclass(name = "PackingSolution", module = "entround", frozen)]
struct PyPackingSolution {
    inner: binpack::PackingSolution,
}

#[pymethods]
impl PyPackingSolution {
    #[getter]
    fn bins(&self) -> Vec<Vec<usize>> {
        self.inner.bins.clone()
    }

    /// Bins added by the repair and small-item steps.
    #[getter]
    fn extra_bins(&self) -> Vec<Vec<usize>> {
        self.inner
            .extra_bins
            .iter()
            .map(|b| b.items.clone())
            .collect()
    }

    #[getter]
    fn rejected(&self) -> Vec<usize> {
        self.inner.rejected.clone()
    }

    #[getter]
    fn total_cost(&self) -> f64 {
        self.inner.total_cost
    }

    #[getter]
    fn lp_objective(&self) -> f64 {
        self.inner.stats.lp_objective
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("solution serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "PackingSolution(cost={}, bins={}, rejected={})",
            self.inner.total_cost,
            self.inner.all_bins().count(),
            self.inner.rejected.len()
        )
    }
}

fn solve_with(
    inst: &PyPackingInstance,
    seed: u64,
    f: fn(
        &binpack::PackingInstance,
        u64,
        &PackingConfig,
    ) -> Result<binpack::PackingSolution, entround_core::error::PackingError>,
) -> PyResult<PyPackingSolution> {
    let inner = f(&inst.inner, seed, &PackingConfig::default()).map_err(runtime_err)?;
    Ok(PyPackingSolution { inner })
}

#[pyfunction]
#[pyo3(signature = (instance, seed=0))]
fn solve_bpr(instance: &PyPackingInstance, seed: u64) -> PyResult<PyPackingSolution> {
    solve_with(instance, seed, binpack::solve_bpr)
}

#[pyfunction]
#[pyo3(signature = (instance, seed=0))]
fn solve_train(instance: &PyPackingInstance, seed: u64) -> PyResult<PyPackingSolution> {
    solve_with(instance, seed, binpack::solve_train)
}

#[pyfunction]
#[pyo3(signature = (instance, seed=0))]
fn solve_bin_packing(instance: &PyPackingInstance, seed: u64) -> PyResult<PyPackingSolution> {
    solve_with(instance, seed, binpack::solve_bin_packing)
}

/// Returns `(feasible, recomputed_cost, problems)`.
#[pyfunction]
fn verify(instance: &PyPackingInstance, solution: &PyPackingSolution) -> (bool, f64, Vec<String>) {
    let v = harness::verify_solution(&instance.inner, &solution.inner);
    (v.feasible, v.recomputed_cost, v.problems)
}

type LpColumn = (Vec<usize>, f64, f64);

/// Returns `(objective, [(items, cost, weight), ...])`.
#[pyfunction]
#[pyo3(signature = (instance, delta=0.05))]
fn solve_pattern_lp(instance: &PyPackingInstance, delta: f64) -> PyResult<(f64, Vec<LpColumn>)> {
    let sol = lp(&*instance.inner.family(), delta).map_err(runtime_err)?;
    let cols = sol
        .solution
        .entries()
        .iter()
        .map(|(p, w)| (p.items.clone(), p.cost, *w))
        .collect();
    Ok((sol.objective, cols))
}

#[pyfunction]
fn g_bound(lam: f64) -> PyResult<f64> {
    discrepancy::g_bound(lam).map_err(value_err)
}

#[pyfunction]
fn g_inverse(b: f64) -> PyResult<f64> {
    discrepancy::g_inverse(b).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (a, delta, mode="pigeonhole"))]
fn find_half_coloring(a: Vec<Vec<f64>>, delta: Vec<f64>, mode: &str) -> PyResult<Vec<i8>> {
    let m = a.first().map_or(0, Vec::len);
    let mode = match mode {
        "pigeonhole" => HalfColoringMode::Pigeonhole,
        "direct" => HalfColoringMode::Direct,
        _ => return Err(PyValueError::new_err(format!("unknown mode '{mode}'"))),
    };
    let d = DiscrepancyBounds::new(delta).map_err(value_err)?;
    let chi = discrepancy::find_half_coloring(&matrix(a, m)?, &d, mode).map_err(runtime_err)?;
    Ok(chi.values().to_vec())
}

/// Rounds `x` to a 0/1 vector; returns a dict with `y` and the discrepancies.
#[pyfunction]
#[pyo3(signature = (x, a=vec![], delta=vec![], b=vec![], mu=vec![], c=None, backend="exhaustive", seed=0))]
#[allow(clippy::too_many_arguments)]
fn entropy_round<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    a: Vec<Vec<f64>>,
    delta: Vec<f64>,
    b: Vec<Vec<f64>>,
    mu: Vec<f64>,
    c: Option<Vec<f64>>,
    backend: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let m = x.len();
    let inst = RoundingInstance::new(
        matrix(a, m)?,
        matrix(b, m)?,
        DiscrepancyBounds::new(delta).map_err(value_err)?,
        mu,
        c.unwrap_or_else(|| vec![0.0; m]),
        x,
    )
    .map_err(value_err)?;
    let rep = rounding::entropy_round(
        &inst,
        self::backend(backend)?,
        &RoundingConfig::default(),
        seed,
    )
    .map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("y", rep.y.clone())?;
    out.set_item("a_discrepancy", rep.a_discrepancy.clone())?;
    out.set_item("b_discrepancy", rep.b_discrepancy.clone())?;
    out.set_item("objective_gap", rep.objective_gap)?;
    out.set_item("within_bound", rep.within_deterministic_bound())?;
    Ok(out)
}

/// Approximate max-profit subset of capacity one; returns `(items, value)`.
#[pyfunction]
#[pyo3(signature = (profits, sizes, eps=0.1))]
fn knapsack(profits: Vec<f64>, sizes: Vec<f64>, eps: f64) -> PyResult<(Vec<usize>, f64)> {
    if profits.len() != sizes.len() {
        return Err(PyValueError::new_err("profits and sizes differ in length"));
    }
    Ok(knapsack_select(&profits, &sizes, eps, None))
}

/// Runs an experiment described by a JSON config; returns the JSON report.
#[pyfunction]
fn run_experiment(config_json: &str) -> PyResult<String> {
    let cfg: ExperimentConfig = serde_json::from_str(config_json).map_err(value_err)?;
    let report = harness::run_experiment(&cfg).map_err(runtime_err)?;
    Ok(report.to_json())
}

/// Default config for a command, as JSON, to edit and pass to `run_experiment`.
#[pyfunction]
fn experiment_config(command: &str) -> PyResult<String> {
    let cmd: harness::Command =
        serde_json::from_value(serde_json::Value::String(command.into())).map_err(value_err)?;
    Ok(serde_json::to_string_pretty(&ExperimentConfig::new(cmd)).expect("config serializes"))
}

#[pymodule]
fn entround(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPackingInstance>()?;
    m.add_class::<PyPackingSolution>()?;
    m.add_function(wrap_pyfunction!(solve_bpr, m)?)?;
    m.add_function(wrap_pyfunction!(solve_train, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bin_packing, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(solve_pattern_lp, m)?)?;
    m.add_function(wrap_pyfunction!(g_bound, m)?)?;
    m.add_function(wrap_pyfunction!(g_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(find_half_coloring, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_round, m)?)?;
    m.add_function(wrap_pyfunction!(knapsack, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(experiment_config, m)?)?;
    Ok(())
}
