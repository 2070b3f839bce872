//! Python bindings. Reports come back as plain dicts and lists built from
//! the same JSON the command-line tool prints; big counts are Python ints.

use num_bigint::BigUint;
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use shiftlab::certify::{almost_glue, weak_glue, weak_spec_report, GlueResult};
use shiftlab::counting::{check_condition, growth_witness, CountTable};
use shiftlab::ct::{check_cond_ii, decompose, extend_to_good};
use shiftlab::factor::{dichotomy_report, verify_factor_language, BlockMap};
use shiftlab::product::{
    refute_almost_spec, replay as replay_certificate, weak_gap_function, weak_glue_product, window_valid,
    Epsilon, GlueSpec, MistakeFunction, RefutationCertificate,
};
use shiftlab::{Error, ErrorKind, Params, RestrictionFamily, Word, XrShift};

/// Longest word the bindings enumerate.
pub const ENUMERATION_CAP: usize = 12;

fn err(e: Error) -> PyErr {
    match (&e, e.kind()) {
        (Error::Overflow(_), _) => PyOverflowError::new_err(e.to_string()),
        (_, ErrorKind::Usage) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Serializes through JSON into native Python objects.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `squares`, `prefix`, or the text of a family JSON file.
fn family(spec: &str) -> PyResult<RestrictionFamily> {
    if spec.trim_start().starts_with('{') {
        RestrictionFamily::from_json(spec).map_err(err)
    } else {
        RestrictionFamily::by_name(spec).map_err(err)
    }
}

fn word(text: &str) -> PyResult<Word> {
    text.parse().map_err(err)
}

fn epsilon(text: &str) -> PyResult<Epsilon> {
    text.parse().map_err(err)
}

/// The shift `X_R` for given `p`, `q` and restriction family.
#[pyclass(name = "Shift", module = "shiftlab", frozen)]
pub struct PyShift {
    inner: XrShift,
}

#[pymethods]
impl PyShift {
    #[new]
    #[pyo3(signature = (p, q, family = "squares"))]
    fn new(p: u32, q: u32, family: &str) -> PyResult<Self> {
        let params = Params::new(p, q).map_err(err)?;
        Ok(PyShift {
            inner: XrShift::new(params, self::family(family)?),
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.params().p()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.params().q()
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().name()
    }

    fn is_allowed(&self, w: &str) -> PyResult<bool> {
        self.inner.is_allowed(&word(w)?).map_err(err)
    }

    fn is_good(&self, w: &str) -> PyResult<bool> {
        self.inner.is_good(&word(w)?).map_err(err)
    }

    fn is_free(&self, w: &str) -> PyResult<bool> {
        self.inner.is_free(&word(w)?).map_err(err)
    }

    fn is_restricted(&self, w: &str) -> PyResult<bool> {
        self.inner.is_restricted(&word(w)?).map_err(err)
    }

    /// Allowed words of length `n` in lexicographic order.
    fn enumerate(&self, n: usize) -> PyResult<Vec<String>> {
        let words = self.inner.enumerate_allowed(n, ENUMERATION_CAP).map_err(err)?;
        Ok(words.map(|w| w.to_string()).collect())
    }

    /// `|B_n|` by enumeration.
    fn count_brute(&self, n: usize) -> PyResult<u64> {
        self.inner.count_allowed_brute(n, ENUMERATION_CAP).map_err(err)
    }

    /// `(prefix, good, suffix)` split at the first marker.
    fn decompose(&self, w: &str) -> PyResult<(String, String, String)> {
        let d = decompose(&self.inner, &word(w)?).map_err(err)?;
        Ok((d.prefix.to_string(), d.good.to_string(), d.suffix.to_string()))
    }

    /// Whether the concatenation of the given good words is good.
    fn glue_good(&self, goods: Vec<String>) -> PyResult<bool> {
        let goods = goods.iter().map(|g| word(g)).collect::<PyResult<Vec<_>>>()?;
        check_cond_ii(&self.inner, &goods).map_err(err)
    }

    /// `(left, tau)` with `left + w` good.
    fn extend_to_good(&self, w: &str, max_prefix: u64) -> PyResult<(String, u64)> {
        let ext = extend_to_good(&self.inner, &word(w)?, max_prefix).map_err(err)?;
        Ok((ext.left.to_string(), ext.tau))
    }

    /// Glues segments in `weak` (transition words) or `almost` (edits) mode.
    #[pyo3(signature = (segments, mode = "weak"))]
    fn glue<'py>(&self, py: Python<'py>, segments: Vec<String>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
        let words = segments.iter().map(|s| word(s)).collect::<PyResult<Vec<_>>>()?;
        let result = match mode {
            "almost" => almost_glue(&self.inner, &words).map_err(err)?,
            "weak" => {
                let (first, rest) = words
                    .split_first()
                    .ok_or_else(|| PyValueError::new_err("weak gluing needs at least one segment"))?;
                let mut acc = GlueResult {
                    output: first.clone(),
                    mistakes: vec![0],
                    budgets: Vec::new(),
                    transitions: Vec::new(),
                    transition_words: Vec::new(),
                };
                for w in rest {
                    let step = weak_glue(&self.inner, &acc.output, w).map_err(err)?;
                    acc.output = step.output;
                    acc.mistakes.push(0);
                    acc.transitions.extend(step.transitions);
                    acc.transition_words.extend(step.transition_words);
                }
                acc
            }
            other => return Err(PyValueError::new_err(format!("mode must be weak or almost, got {other:?}"))),
        };
        to_py(py, &result)
    }

    fn __repr__(&self) -> String {
        format!("Shift(p={}, q={}, family={:?})", self.p(), self.q(), self.family())
    }
}

/// Rows `{n, F, G, B}` for `0 <= n <= horizon`, counts as ints.
#[pyfunction]
#[pyo3(signature = (p, q, horizon, family = "squares"))]
fn count_table(p: u32, q: u32, horizon: usize, family: &str) -> PyResult<Vec<(usize, BigUint, BigUint, BigUint)>> {
    let params = Params::new(p, q).map_err(err)?;
    let t = CountTable::build(params, &self::family(family)?, horizon).map_err(err)?;
    Ok(t.rows()
        .map(|r| (r.n, r.free.clone(), r.good.clone(), r.allowed.clone()))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (p, q, family = "squares", cutoff = 1000))]
fn condition<'py>(py: Python<'py>, p: u32, q: u32, family: &str, cutoff: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &check_condition(p, q, &self::family(family)?, cutoff).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p, q, family = "squares", n_max = 200))]
fn witness<'py>(py: Python<'py>, p: u32, q: u32, family: &str, n_max: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &growth_witness(p, q, &self::family(family)?, n_max).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (k_max, family = "squares"))]
fn gaps<'py>(py: Python<'py>, k_max: u64, family: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &weak_spec_report(&self::family(family)?, k_max).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p, q, family = "squares"))]
fn dichotomy<'py>(py: Python<'py>, p: u32, q: u32, family: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &dichotomy_report(p, q, &self::family(family)?).map_err(err)?)
}

/// Whether merging colors maps `B_n` of the source onto `B_n` of the target.
#[pyfunction]
#[pyo3(signature = (from_p, to_p, q, n, family = "squares"))]
fn verify_factor(from_p: u32, to_p: u32, q: u32, n: usize, family: &str) -> PyResult<bool> {
    let map = BlockMap::merge(from_p, to_p, q).map_err(err)?;
    verify_factor_language(&map, &self::family(family)?, n, ENUMERATION_CAP).map_err(err)
}

/// Gap `M_eps(l)` for the product system's weak specification.
#[pyfunction]
fn gap_function(eps: &str, l: u64) -> PyResult<u64> {
    weak_gap_function(epsilon(eps)?, l).map_err(err)
}

/// Glues product windows given as JSON `[{window, alpha, beta}, ...]`.
#[pyfunction]
fn product_glue<'py>(py: Python<'py>, eps: &str, specs: &str) -> PyResult<Bound<'py, PyAny>> {
    let specs: Vec<GlueSpec> = from_json(specs)?;
    let window = weak_glue_product(&specs, epsilon(eps)?).map_err(err)?;
    let valid = window_valid(&window);
    to_py(py, &serde_json::json!({"window": window, "valid": valid}))
}

/// Refutation certificate for mistake function `sqrt`, `log` or `zero`.
#[pyfunction]
#[pyo3(signature = (g, eps0 = "1"))]
fn refute<'py>(py: Python<'py>, g: &str, eps0: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = MistakeFunction::by_name(g, epsilon(eps0)?).map_err(err)?;
    to_py(py, &refute_almost_spec(&g).map_err(err)?)
}

/// Replays a certificate given as JSON text.
#[pyfunction]
fn replay<'py>(py: Python<'py>, certificate: &str) -> PyResult<Bound<'py, PyAny>> {
    let cert: RefutationCertificate = from_json(certificate)?;
    to_py(py, &replay_certificate(&cert))
}

#[pymodule]
#[pyo3(name = "shiftlab")]
pub fn shiftlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyShift>()?;
    m.add_function(wrap_pyfunction!(count_table, m)?)?;
    m.add_function(wrap_pyfunction!(condition, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(gaps, m)?)?;
    m.add_function(wrap_pyfunction!(dichotomy, m)?)?;
    m.add_function(wrap_pyfunction!(verify_factor, m)?)?;
    m.add_function(wrap_pyfunction!(gap_function, m)?)?;
    m.add_function(wrap_pyfunction!(product_glue, m)?)?;
    m.add_function(wrap_pyfunction!(refute, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    Ok(())
}
