//! Python bindings: instances, thresholds, offline solutions, online players and sweeps.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cfl_core::harness::{
    cmd_adversary, cmd_sweep, default_probe, parse_roster, write_records, AlgorithmSpec, Cell,
    InstanceFile, SweepConfig,
};
use cfl_core::instances::{generate_synthetic, make_inactive_advice, GeneratorConfig};
use cfl_core::model::{trajectory_cost, validate_instance, Decision};
use cfl_core::{offline, thresholds, CflError};

create_exception!(cfl_bench, BenchError, PyException);

fn to_py(e: CflError) -> PyErr {
    match e {
        CflError::Numeric { .. } | CflError::Infeasible(_) => PyRuntimeError::new_err(e.to_string()),
        CflError::Io(_) | CflError::Json(_) | CflError::Csv(_) => BenchError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

type Schedule = Vec<Vec<f64>>;

fn unwrap_schedule(ds: Vec<Decision>) -> Schedule {
    ds.into_iter().map(Decision::into_inner).collect()
}

fn wrap_schedule(rows: Schedule) -> Vec<Decision> {
    rows.into_iter().map(Decision).collect()
}

/// A problem instance: per-step cost vectors plus bounds and weights.
#[pyclass(name = "Instance", module = "cfl_bench", from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: cfl_core::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (costs, c, w, lower, upper))]
    fn new(costs: Schedule, c: Vec<f64>, w: Vec<f64>, lower: f64, upper: f64) -> PyResult<Self> {
        let setting = cfl_core::Setting::new(costs.len(), lower, upper, c, w).map_err(to_py)?;
        let inner = cfl_core::Instance::new(setting, costs).map_err(to_py)?;
        let check = validate_instance(&inner);
        if let Some(v) = check.violations.first() {
            return Err(PyValueError::new_err(format!("invalid instance: {v}")));
        }
        Ok(PyInstance { inner })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    #[getter]
    fn lower(&self) -> f64 {
        self.inner.lower()
    }

    #[getter]
    fn upper(&self) -> f64 {
        self.inner.upper()
    }

    /// Largest switching-to-throughput weight ratio.
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn costs(&self) -> Schedule {
        self.inner.costs.clone()
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.inner.setting.c_weights.clone()
    }

    #[getter]
    fn w(&self) -> Vec<f64> {
        self.inner.setting.w_weights.clone()
    }

    /// Hitting plus switching cost of a schedule, including the moves from and to the origin.
    fn cost(&self, decisions: Schedule) -> PyResult<f64> {
        Ok(trajectory_cost(&self.inner, &wrap_schedule(decisions)).map_err(to_py)?.total)
    }

    fn to_json(&self) -> PyResult<String> {
        let file = InstanceFile::from_instance(&self.inner, None, None, None);
        serde_json::to_string(&file).map_err(|e| to_py(e.into()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| to_py(e.into()))?;
        Ok(PyInstance { inner: file.to_instance().map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(d={}, T={}, L={}, U={}, beta={:.4})",
            self.inner.d(),
            self.inner.horizon(),
            self.inner.lower(),
            self.inner.upper(),
            self.inner.beta()
        )
    }
}

/// Optimal competitive ratio for bounds `lower`, `upper` and switching ratio `beta`.
#[pyfunction]
fn compute_alpha(lower: f64, upper: f64, beta: f64) -> PyResult<f64> {
    thresholds::compute_alpha(lower, upper, beta).map_err(to_py)
}

/// Robustness factor of a `(1+epsilon)`-consistent player.
#[pyfunction]
fn compute_gamma(epsilon: f64, lower: f64, upper: f64, beta: f64) -> PyResult<f64> {
    thresholds::compute_gamma(epsilon, lower, upper, beta).map_err(to_py)
}

/// Random instances with `L = 1` and `U = ul`.
#[pyfunction]
#[pyo3(signature = (count, seed, d=5, ul=250.0, beta=50.0, sigma=50.0))]
fn generate(count: usize, seed: u64, d: usize, ul: f64, beta: f64, sigma: f64) -> PyResult<Vec<PyInstance>> {
    let cfg = GeneratorConfig {
        d,
        upper_over_lower: ul,
        beta_nominal: beta,
        sigma,
        count,
        ..GeneratorConfig::standard(seed)
    };
    Ok(generate_synthetic(&cfg)
        .map_err(to_py)?
        .into_iter()
        .map(|inner| PyInstance { inner })
        .collect())
}

/// Offline optimum as `(objective, decisions)`.
#[pyfunction]
fn solve_opt(instance: &PyInstance) -> PyResult<(f64, Schedule)> {
    let sol = offline::solve_opt(&instance.inner).map_err(to_py)?;
    Ok((sol.objective, unwrap_schedule(sol.trajectory.decisions)))
}

/// Advice mixing the optimal (`xi = 0`) and the worst (`xi = 1`) schedule.
#[pyfunction]
fn make_advice(instance: &PyInstance, xi: f64) -> PyResult<Schedule> {
    Ok(unwrap_schedule(offline::make_advice(&instance.inner, xi).map_err(to_py)?))
}

/// Advice that idles until the final forced fill.
#[pyfunction]
fn inactive_advice(instance: &PyInstance) -> PyResult<Schedule> {
    Ok(unwrap_schedule(make_inactive_advice(&instance.inner).map_err(to_py)?))
}

/// Runs a player such as `"alg1"` or `"clip:eps=2"`; returns `(cost, decisions)`.
#[pyfunction]
#[pyo3(signature = (instance, algorithm, advice=None))]
fn run(instance: &PyInstance, algorithm: &str, advice: Option<Schedule>) -> PyResult<(f64, Schedule)> {
    let spec: AlgorithmSpec = algorithm.parse().map_err(to_py)?;
    let advice = advice.map(wrap_schedule);
    let traj = spec.run(&instance.inner, advice.as_deref()).map_err(to_py)?;
    Ok((traj.total_cost(), unwrap_schedule(traj.decisions)))
}

type ProbeReport = (Vec<(usize, f64, f64)>, f64, f64);

/// Adversary probe; returns `(rows, max_ratio, alpha)` with rows `(level, y, ratio)`.
#[pyfunction]
#[pyo3(signature = (algorithm="alg1", points=25, m=50, w_steps=100, d=2, upper=250.0, beta=0.0))]
fn adversary(
    algorithm: &str,
    points: usize,
    m: usize,
    w_steps: usize,
    d: usize,
    upper: f64,
    beta: f64,
) -> PyResult<ProbeReport> {
    let spec: AlgorithmSpec = algorithm.parse().map_err(to_py)?;
    let base = cfl_core::instances::AdversaryConfig { d, upper, beta, m, w_steps, ..default_probe() };
    let rep = cmd_adversary(spec, &base, points).map_err(to_py)?;
    let rows = rep.rows.iter().map(|r| (r.level, r.y, r.ratio)).collect();
    Ok((rows, rep.max_ratio, rep.alpha))
}

/// Runs a sweep and returns the records as CSV text. `cells` is a preset name or
/// `;`-separated cells like `d=5,beta=10`.
#[pyfunction]
#[pyo3(signature = (cells="default", seed=42, per_cell=100, algs=None, xi=None, eps=None))]
fn sweep_csv(
    cells: &str,
    seed: u64,
    per_cell: usize,
    algs: Option<&str>,
    xi: Option<Vec<f64>>,
    eps: Option<Vec<f64>>,
) -> PyResult<String> {
    let mut cfg = if cells.contains('=') {
        let parsed = cells
            .split(';')
            .map(str::parse::<Cell>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?;
        SweepConfig { cells: parsed, ..SweepConfig::preset("default", seed, true).map_err(to_py)? }
    } else {
        SweepConfig::preset(cells, seed, true).map_err(to_py)?
    };
    cfg.per_cell = per_cell;
    if let Some(eps) = eps {
        cfg.eps_list = eps;
    }
    if let Some(xi) = xi {
        cfg.xi_list = xi;
    }
    if let Some(algs) = algs {
        cfg.roster = parse_roster(algs, &cfg.eps_list).map_err(to_py)?;
    }
    let records = cmd_sweep(&cfg).map_err(to_py)?;
    let mut buf = Vec::new();
    write_records(&mut buf, &records).map_err(to_py)?;
    String::from_utf8(buf).map_err(|e| BenchError::new_err(e.to_string()))
}

#[pymodule]
fn cfl_bench(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BenchError", m.py().get_type::<BenchError>())?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(compute_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(compute_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_opt, m)?)?;
    m.add_function(wrap_pyfunction!(make_advice, m)?)?;
    m.add_function(wrap_pyfunction!(inactive_advice, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(adversary, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    Ok(())
}
