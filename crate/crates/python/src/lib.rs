//! Python bindings for `psu3_core`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use psu3_core::config::{Task, DEFAULT_MONTE_CARLO_TRIALS, DEFAULT_SEED};
use psu3_core::context::GroupContext;
use psu3_core::euler::{self, CaseTag};
use psu3_core::field::BinaryField;
use psu3_core::moebius::{mobius_from_top, PosetTable};
use psu3_core::{Error, OutputFormat, ReportDocument};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Usage(_) | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_task(name: &str) -> PyResult<Task> {
    Task::ALL
        .into_iter()
        .find(|t| t.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown task {name:?}")))
}

/// Run configuration. `tasks` takes names such as "mu" or "chi"; missing
/// prerequisites are added automatically.
#[pyclass(name = "RunConfig", module = "psu3", from_py_object)]
#[derive(Clone)]
struct PyRunConfig {
    inner: psu3_core::RunConfig,
}

#[pymethods]
impl PyRunConfig {
    #[new]
    #[pyo3(signature = (n=1, tasks=None, seed=DEFAULT_SEED, trials=DEFAULT_MONTE_CARLO_TRIALS, primes=None, stretch=false, cache_dir=None))]
    fn new(
        n: u32,
        tasks: Option<Vec<String>>,
        seed: u64,
        trials: u64,
        primes: Option<Vec<u64>>,
        stretch: bool,
        cache_dir: Option<std::path::PathBuf>,
    ) -> PyResult<Self> {
        let tasks = match tasks {
            Some(names) => names.iter().map(|s| parse_task(s)).collect::<PyResult<Vec<_>>>()?,
            None => vec![Task::Geometry, Task::Group],
        };
        let mut inner = psu3_core::RunConfig::new(n, &tasks).map_err(py_err)?;
        inner.rng_seed = seed;
        inner.monte_carlo_trials = trials;
        inner.primes = primes.unwrap_or_default();
        inner.stretch = stretch;
        inner.cache_dir = cache_dir;
        inner.validate().map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    #[getter]
    fn tasks(&self) -> Vec<&'static str> {
        self.inner.tasks.iter().map(|t| t.name()).collect()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.rng_seed
    }

    fn __repr__(&self) -> String {
        format!("RunConfig(n={}, tasks={:?}, seed={})", self.inner.n, self.tasks(), self.inner.rng_seed)
    }
}

/// Result of `run`: verdicts, computed blocks and renderers.
#[pyclass(name = "Report", module = "psu3")]
struct PyReport {
    inner: ReportDocument,
}

#[pymethods]
impl PyReport {
    fn json(&self) -> PyResult<String> {
        self.inner.render(OutputFormat::Json).map_err(py_err)
    }

    fn csv(&self) -> PyResult<String> {
        self.inner.render(OutputFormat::Csv).map_err(py_err)
    }

    fn text(&self) -> PyResult<String> {
        self.inner.render(OutputFormat::Text).map_err(py_err)
    }

    /// The whole report as Python objects.
    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.json()?)
    }

    #[getter]
    fn exit_code(&self) -> i32 {
        self.inner.exit_code()
    }

    #[getter]
    fn summary(&self) -> (u64, u64, u64, u64) {
        let s = &self.inner.summary;
        (s.pass, s.fail, s.discrepancy, s.reported)
    }

    #[getter]
    fn errors(&self) -> Vec<String> {
        self.inner.errors.clone()
    }
}

#[pyfunction]
fn run(py: Python<'_>, config: &PyRunConfig) -> PyResult<PyReport> {
    let cfg = config.inner.clone();
    let inner = py.detach(move || psu3_core::run(&cfg)).map_err(py_err)?;
    Ok(PyReport { inner })
}

/// GF(2^degree) with its standard modulus.
#[pyclass(name = "Field", module = "psu3")]
struct PyField {
    inner: BinaryField,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(degree: u32) -> PyResult<Self> {
        Ok(Self { inner: BinaryField::conway(degree).map_err(py_err)? })
    }

    #[getter]
    fn size(&self) -> u64 {
        self.inner.size()
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.inner.modulus()
    }

    fn check(&self, a: u64) -> PyResult<u32> {
        if a >= self.inner.size() {
            return Err(PyValueError::new_err(format!("{a} is not an element of GF({})", self.inner.size())));
        }
        Ok(a as u32)
    }

    fn add(&self, a: u64, b: u64) -> PyResult<u32> {
        Ok(self.check(a)? ^ self.check(b)?)
    }

    fn mul(&self, a: u64, b: u64) -> PyResult<u32> {
        Ok(self.inner.mul(self.check(a)?, self.check(b)?))
    }

    fn inv(&self, a: u64) -> PyResult<u32> {
        self.inner.inv(self.check(a)?).ok_or_else(|| PyValueError::new_err("zero has no inverse"))
    }

    fn pow(&self, a: u64, e: u64) -> PyResult<u32> {
        Ok(self.inner.pow(self.check(a)?, e))
    }
}

/// PSU(3, q) with q = 2^(2^n) acting on the Hermitian curve. Only n = 1 is
/// small enough to build the element table.
#[pyclass(name = "Group", module = "psu3")]
struct PyGroup {
    ctx: GroupContext,
}

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (n=1))]
    fn new(py: Python<'_>, n: u32) -> PyResult<Self> {
        if n != 1 {
            return Err(PyValueError::new_err("element tables are only built for n = 1"));
        }
        let ctx = py.detach(|| GroupContext::build(n)).map_err(py_err)?;
        Ok(Self { ctx })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.ctx.q()
    }

    #[getter]
    fn order(&self) -> u64 {
        self.ctx.order()
    }

    /// Euler characteristic report for the p-subgroup poset, both routes.
    fn chi(&self, py: Python<'_>, p: u64) -> PyResult<Py<PyAny>> {
        let report = py.detach(|| euler::chi_report(&self.ctx, p)).map_err(py_err)?;
        let text = serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &text)
    }
}

#[pyfunction]
fn gaussian_binomial(m: u32, r: u32, base: u64) -> PyResult<BigInt> {
    euler::gaussian_binomial(m, r, base).map_err(py_err)
}

#[pyfunction]
fn telescoping_sum(n: u32) -> PyResult<BigInt> {
    euler::telescoping_sum(n).map_err(py_err)
}

/// Returns (case tag, Sylow order) for the prime p in PSU(3, q).
#[pyfunction]
fn prime_case(q: u64, p: u64) -> PyResult<(&'static str, u64)> {
    let c = euler::prime_case(q, p).map_err(py_err)?;
    Ok((c.case_tag.name(), c.sylow_order))
}

#[pyfunction]
fn brown_check(chi: BigInt, sylow_order: u64) -> bool {
    euler::brown_check(&chi, sylow_order)
}

/// Published (table, theorem) Euler characteristics for a case tag.
#[pyfunction]
fn published_chi(q: u64, case_tag: &str) -> PyResult<(BigInt, BigInt)> {
    let tag = [CaseTag::NotDividing, CaseTag::PEq2, CaseTag::DivQPlus1, CaseTag::DivQMinus1, CaseTag::DivQ2Q1]
        .into_iter()
        .find(|t| t.name() == case_tag)
        .ok_or_else(|| PyValueError::new_err(format!("unknown case tag {case_tag:?}")))?;
    Ok(euler::published_chi(q, tag))
}

/// Möbius values mu(x, top) of a bounded poset given by up-sets:
/// `up[x]` lists the elements strictly above x.
#[pyfunction]
fn mobius(up: Vec<Vec<u32>>) -> PyResult<Vec<BigInt>> {
    let poset = PosetTable::from_up_sets(up).map_err(py_err)?;
    mobius_from_top(&poset).map_err(py_err)
}

#[pymodule]
fn psu3(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyRunConfig>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(telescoping_sum, m)?)?;
    m.add_function(wrap_pyfunction!(prime_case, m)?)?;
    m.add_function(wrap_pyfunction!(brown_check, m)?)?;
    m.add_function(wrap_pyfunction!(published_chi, m)?)?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_runs_inside_an_embedded_interpreter() {
        pyo3::append_to_inittab!(psu3);
        Python::initialize();
        Python::attach(|py| {
            let code = c"
import psu3
f = psu3.Field(2)
assert [f.mul(2, x) for x in range(4)] == [0, 2, 3, 1]
assert psu3.gaussian_binomial(3, 1, 2) == 7
assert psu3.mobius([[], [0], [0, 1]]) == [1, -1, 0]
cfg = psu3.RunConfig(tasks=['group'], seed=3)
assert cfg.tasks == ['geometry', 'group']
r = psu3.run(cfg)
assert r.exit_code == 0 and r.summary[1] == 0
assert r.to_dict()['results']['group']['order'] == 62400
";
            py.run(code, None, None).unwrap();
        });
    }
}
