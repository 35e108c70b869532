//! Python bindings: a `State` class wrapping validated two-qubit density
//! matrices plus module-level functions for the closed forms, reference
//! tables and verification suites.
//!
//! Build with `cargo build -p qchannel-py --release`, copy
//! `libqchannel_py.so` next to your script as `qchannel_py.so` (or onto
//! `PYTHONPATH`), then `import qchannel_py`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qchannel::closedform::{
    self, family_cf, fidelity_vs_entropy, named_constants, wd_bell_classify, FamilyKind,
};
use qchannel::metrics::{analyze, chsh_max_oracle, fef_sampling_oracle, fully_entangled_fraction};
use qchannel::numerics::ComplexMatrix;
use qchannel::states::{make_state, validate_density, DensityMatrix, FamilySpec};
use qchannel::tables::{self, Cell, SweepTable};
use qchannel::telesim::{average_fidelity_2design, haar_average_fidelity, teleport, PureQubit};
use qchannel::verify::{self, Level};
use qchannel::Error;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Recursively convert a serde_json value into Python objects.
fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into_any()
            } else {
                n.as_f64()
                    .ok_or_else(|| PyValueError::new_err("non-finite number"))?
                    .into_pyobject(py)?
                    .unbind()
                    .into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.unbind().into_any()
        }
    })
}

fn serializable_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let json = serde_json::to_value(value)
        .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &json)
}

fn table_to_py(py: Python<'_>, table: &SweepTable) -> PyResult<Py<PyAny>> {
    let dict = PyDict::new(py);
    let columns = PyList::empty(py);
    for col in &table.columns {
        let c = PyDict::new(py);
        c.set_item("name", col.name)?;
        c.set_item("provenance", col.provenance.label())?;
        columns.append(c)?;
    }
    dict.set_item("columns", columns)?;
    let rows = PyList::empty(py);
    for row in &table.rows {
        let r = PyList::empty(py);
        for cell in row {
            match cell {
                Cell::Num(x) => r.append(*x)?,
                Cell::Bool(b) => r.append(*b)?,
            }
        }
        rows.append(r)?;
    }
    dict.set_item("rows", rows)?;
    Ok(dict.unbind().into_any())
}

fn parse_kind(family: &str) -> PyResult<FamilyKind> {
    FamilyKind::parse(family).ok_or_else(|| {
        PyValueError::new_err(format!(
            "unknown family '{family}' (expected werner, mems, wd or new)"
        ))
    })
}

/// A validated two-qubit density matrix.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct State {
    rho: DensityMatrix,
    spec: Option<FamilySpec>,
}

#[pymethods]
impl State {
    /// Werner state with singlet fraction f_w in [0, 1].
    #[staticmethod]
    fn werner(f_w: f64) -> PyResult<Self> {
        Self::from_spec(FamilySpec::Werner { f_w })
    }

    /// MEMS state with concurrence c in [0, 1].
    #[staticmethod]
    fn mems(c: f64) -> PyResult<Self> {
        Self::from_spec(FamilySpec::Mems { c })
    }

    /// Werner derivative with 1/2 < f_w <= 1 and 1/2 <= a <= 1.
    #[staticmethod]
    fn werner_derivative(f_w: f64, a: f64) -> PyResult<Self> {
        Self::from_spec(FamilySpec::WernerDerivative { f_w, a })
    }

    /// GHZ/W-trace mixture with weight p in [0, 1].
    #[staticmethod]
    fn nmems_new(p: f64) -> PyResult<Self> {
        Self::from_spec(FamilySpec::NmemsNew { p })
    }

    /// Build from a row-major 4x4 nested list of (re, im) pairs.
    #[staticmethod]
    fn from_entries(entries: Vec<Vec<(f64, f64)>>) -> PyResult<Self> {
        if entries.len() != 4 || entries.iter().any(|row| row.len() != 4) {
            return Err(PyValueError::new_err("expected a 4x4 nested list"));
        }
        let mut flat = Vec::with_capacity(16);
        for row in &entries {
            for &(re, im) in row {
                flat.push(Complex64::new(re, im));
            }
        }
        let rho = validate_density(ComplexMatrix::new(4, flat)).map_err(err)?;
        Ok(State { rho, spec: None })
    }

    /// Parse the shared matrix JSON format and validate.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let rho = DensityMatrix::from_json(text).map_err(err)?;
        Ok(State { rho, spec: None })
    }

    /// Row-major 4x4 nested list of (re, im) pairs.
    fn entries(&self) -> Vec<Vec<(f64, f64)>> {
        (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let z = self.rho.entry(i, j);
                        (z.re, z.im)
                    })
                    .collect()
            })
            .collect()
    }

    fn to_json(&self) -> String {
        self.rho.to_json()
    }

    /// Definitional metric bundle as a dict (s_lin, concurrence, fef,
    /// n_value, m_value, f_opt, f_opt_raw, useful, chsh_violated).
    fn metrics(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = analyze(&self.rho).map_err(err)?;
        serializable_to_py(py, &report)
    }

    /// Closed-form bundle for family-built states (None for raw matrices).
    fn closed_form(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        match self.spec {
            Some(spec) => serializable_to_py(py, &family_cf(spec).map_err(err)?),
            None => Ok(py.None()),
        }
    }

    /// Exact fully entangled fraction via the magic-basis eigenproblem.
    fn fef(&self) -> f64 {
        fully_entangled_fraction(&self.rho)
    }

    /// Sampled lower bound on the fully entangled fraction.
    #[pyo3(signature = (samples=20_000, seed=0))]
    fn fef_sampled(&self, samples: usize, seed: u64) -> f64 {
        fef_sampling_oracle(&self.rho, samples, seed)
    }

    /// Hill-climbed CHSH maximum (lower bound on 2 sqrt(M)).
    #[pyo3(signature = (grid=24))]
    fn chsh_max(&self, grid: usize) -> PyResult<f64> {
        chsh_max_oracle(&self.rho, grid).map_err(err)
    }

    /// Standard-protocol average fidelity over the six-state 2-design.
    fn fidelity_2design(&self) -> f64 {
        average_fidelity_2design(&self.rho)
    }

    /// Monte-Carlo average fidelity over n Haar-random inputs.
    #[pyo3(signature = (n=10_000, seed=0))]
    fn haar_average_fidelity(&self, n: usize, seed: u64) -> f64 {
        haar_average_fidelity(&self.rho, n, seed)
    }

    /// Teleport the input alpha|0> + beta|1> (amplitudes as (re, im)
    /// pairs) through this channel: dict with outcome probabilities,
    /// per-outcome receiver states and the averaged fidelity.
    fn teleport(&self, py: Python<'_>, alpha: (f64, f64), beta: (f64, f64)) -> PyResult<Py<PyAny>> {
        let input = PureQubit::new(
            Complex64::new(alpha.0, alpha.1),
            Complex64::new(beta.0, beta.1),
        )
        .map_err(err)?;
        let outcome = teleport(&self.rho, &input);
        let dict = PyDict::new(py);
        dict.set_item("probabilities", outcome.probabilities.to_vec())?;
        dict.set_item("fidelity", outcome.fidelity)?;
        let states = PyList::empty(py);
        for m in &outcome.output_states {
            let rows: Vec<Vec<(f64, f64)>> = (0..2)
                .map(|i| {
                    (0..2)
                        .map(|j| {
                            let z = m.get(i, j);
                            (z.re, z.im)
                        })
                        .collect()
                })
                .collect();
            states.append(rows)?;
        }
        dict.set_item("output_states", states)?;
        Ok(dict.unbind().into_any())
    }

    fn __repr__(&self) -> String {
        match self.spec {
            Some(spec) => format!("State({spec:?})"),
            None => "State(<matrix>)".to_string(),
        }
    }
}

impl State {
    fn from_spec(spec: FamilySpec) -> PyResult<Self> {
        let rho = make_state(spec).map_err(err)?;
        Ok(State {
            rho,
            spec: Some(spec),
        })
    }
}

/// Closed forms for one family member, e.g. closed_form("werner", fw=0.9).
#[pyfunction]
#[pyo3(signature = (family, fw=None, a=None, c=None, p=None))]
fn closed_form(
    py: Python<'_>,
    family: &str,
    fw: Option<f64>,
    a: Option<f64>,
    c: Option<f64>,
    p: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let missing = |flag: &str| PyValueError::new_err(format!("{flag} is required"));
    let spec = match parse_kind(family)? {
        FamilyKind::Werner => FamilySpec::Werner {
            f_w: fw.ok_or_else(|| missing("fw"))?,
        },
        FamilyKind::Mems => FamilySpec::Mems {
            c: c.ok_or_else(|| missing("c"))?,
        },
        FamilyKind::Wd => FamilySpec::WernerDerivative {
            f_w: fw.ok_or_else(|| missing("fw"))?,
            a: a.ok_or_else(|| missing("a"))?,
        },
        FamilyKind::New => FamilySpec::NmemsNew {
            p: p.ok_or_else(|| missing("p"))?,
        },
    };
    serializable_to_py(py, &family_cf(spec).map_err(err)?)
}

/// Optimal teleportation fidelity at a given linear entropy.
#[pyfunction]
#[pyo3(signature = (family, s_lin, a=None))]
fn fidelity_at_entropy(family: &str, s_lin: f64, a: Option<f64>) -> PyResult<f64> {
    fidelity_vs_entropy(parse_kind(family)?, s_lin, a).map_err(err)
}

/// Crossover conditions between the GHZ/W mixture and the Werner
/// derivative at (f_w, a).
#[pyfunction]
fn crossover(py: Python<'_>, fw: f64, a: f64) -> PyResult<Py<PyAny>> {
    serializable_to_py(py, &closedform::crossover(fw, a).map_err(err)?)
}

/// CHSH case label for the Werner derivative, with (beta, gamma) when real.
#[pyfunction]
fn wd_bell_case(fw: f64, a: f64) -> PyResult<(String, Option<(f64, f64)>)> {
    let (case, roots) = wd_bell_classify(fw, a).map_err(err)?;
    Ok((case.to_string(), roots))
}

/// Named interval endpoints and thresholds as a dict.
#[pyfunction]
fn constants(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let dict = PyDict::new(py);
    for c in named_constants() {
        dict.set_item(c.name, c.value)?;
    }
    Ok(dict.unbind().into_any())
}

#[pyfunction]
fn table1(py: Python<'_>) -> PyResult<Py<PyAny>> {
    table_to_py(py, &tables::table1().map_err(err)?)
}

#[pyfunction]
fn table2(py: Python<'_>) -> PyResult<Py<PyAny>> {
    table_to_py(py, &tables::table2().map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (step=0.01))]
fn fig1(py: Python<'_>, step: f64) -> PyResult<Py<PyAny>> {
    table_to_py(py, &tables::fig1(step).map_err(err)?)
}

/// Run the verification suite ("quick" or "full"); list of check dicts.
#[pyfunction]
#[pyo3(signature = (level="quick"))]
fn run_verify(py: Python<'_>, level: &str) -> PyResult<Py<PyAny>> {
    let level = match level {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown level '{other}' (expected quick or full)"
            )))
        }
    };
    let list = PyList::empty(py);
    for check in verify::run(level) {
        list.append(json_to_py(
            py,
            &serde_json::to_value(&check)
                .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?,
        )?)?;
    }
    Ok(list.unbind().into_any())
}

#[pymodule]
fn qchannel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<State>()?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_at_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(crossover, m)?)?;
    m.add_function(wrap_pyfunction!(wd_bell_case, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(table2, m)?)?;
    m.add_function(wrap_pyfunction!(fig1, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
