//! Python bindings: `import episturm_py`.
//!
//! Words cross the boundary as `str` over `a, b, c, ...`; indices as
//! `fractions.Fraction`; structured results as plain dicts.

use std::collections::BTreeSet;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use episturm::blocks::DEFAULT_LEVEL_GUARD;
use episturm::{oracle, partition, powers, singular, verify, BlockTable, DirectiveSpec, Error, RationalIndex, Word};

create_exception!(episturm_py, EpisturmError, PyException);
create_exception!(episturm_py, ResourceError, EpisturmError);
create_exception!(episturm_py, VerificationError, EpisturmError);

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::Resource(_) => ResourceError::new_err(msg),
        Error::InvariantViolation(_) | Error::Ambiguity { .. } | Error::Unstable(_) | Error::InsufficientData(_) => {
            VerificationError::new_err(msg)
        }
        Error::Range(_) | Error::Cancellation(_) | Error::Parse(_) | Error::NotAFactor(_) => PyValueError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for episturm::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn word(s: &str) -> PyResult<Word> {
    s.parse().py_err()
}

fn fraction(py: Python<'_>, r: RationalIndex) -> PyResult<Py<PyAny>> {
    let fractions = py.import("fractions")?;
    let whole = r.whole as u128 * r.den as u128 + r.num as u128;
    Ok(fractions.getattr("Fraction")?.call1((whole, r.den))?.unbind())
}

/// Serializable value to a Python object through the JSON encoding.
fn to_object<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| EpisturmError::new_err(e.to_string()))?;
    Ok(py.import("json")?.getattr("loads")?.call1((text,))?.unbind())
}

fn words(set: &BTreeSet<Word>) -> Vec<String> {
    set.iter().map(ToString::to_string).collect()
}

/// Memoized block data for one directive specification.
#[pyclass(frozen, module = "episturm_py")]
struct Blocks {
    table: BlockTable,
}

#[pymethods]
impl Blocks {
    #[new]
    #[pyo3(signature = (spec, guard = DEFAULT_LEVEL_GUARD))]
    fn new(spec: &str, guard: usize) -> PyResult<Self> {
        let spec: DirectiveSpec = spec.parse().py_err()?;
        Ok(Blocks {
            table: BlockTable::with_guard(spec, guard),
        })
    }

    #[getter]
    fn k(&self) -> usize {
        self.table.k()
    }

    #[getter]
    fn spec(&self) -> String {
        self.table.spec().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Blocks({:?})", self.table.spec().to_string())
    }

    /// `d_i`, zero for `i ≤ 0`.
    fn d(&self, i: i64) -> PyResult<usize> {
        self.table.d(i).py_err()
    }

    fn s(&self, n: i64) -> PyResult<String> {
        Ok(self.table.s(n).py_err()?.to_string())
    }

    fn len_s(&self, n: i64) -> PyResult<u64> {
        self.table.len_s(n).py_err()
    }

    fn big_d(&self, n: i64) -> PyResult<String> {
        Ok(self.table.big_d(n).py_err()?.to_string())
    }

    fn length_d(&self, n: i64) -> PyResult<i64> {
        self.table.length_d(n).py_err()
    }

    fn big_g(&self, n: i64, r: usize) -> PyResult<String> {
        Ok(self.table.big_g(n, r).py_err()?.to_string())
    }

    fn r(&self, n: i64) -> PyResult<String> {
        Ok(self.table.r(n).py_err()?.to_string())
    }

    fn q(&self, n: usize) -> PyResult<u64> {
        self.table.q(n).py_err()
    }

    fn p(&self, n: usize) -> PyResult<u64> {
        self.table.p(n).py_err()
    }

    fn big_l(&self, n: usize) -> PyResult<usize> {
        self.table.big_l(n).py_err()
    }

    /// `s_m` as `(level, exponent)` pairs.
    fn expansion(&self, m: i64) -> PyResult<Vec<(i64, usize)>> {
        self.table.expansion(m).py_err()
    }

    fn prefix(&self, length: usize) -> PyResult<String> {
        if length == 0 {
            return Ok(String::new());
        }
        Ok(oracle::generate_prefix(&self.table, length).py_err()?.prefix(length).to_string())
    }

    /// Index of `s_n` in the word and its witness.
    fn block_index(&self, py: Python<'_>, n: i64) -> PyResult<(Py<PyAny>, String)> {
        let r = powers::block_index(&self.table, n).py_err()?;
        Ok((fraction(py, r.value)?, r.witness.to_string()))
    }

    /// Greatest power of `s_n` that is a prefix, and `r_(n+1)`.
    fn prefix_index(&self, py: Python<'_>, n: i64) -> PyResult<(Py<PyAny>, String)> {
        let r = powers::prefix_index(&self.table, n).py_err()?;
        Ok((fraction(py, r.value)?, r.witness.to_string()))
    }

    /// Closed-form census of `l`-th powers of length `m`.
    fn census(&self, py: Python<'_>, m: u64, l: usize) -> PyResult<Py<PyAny>> {
        let c = powers::census(&self.table, m, l).py_err()?;
        let out = to_object(py, &c)?;
        out.bind(py)
            .cast::<PyDict>()?
            .set_item("words", words(&c.witness_set().py_err()?))?;
        Ok(out)
    }

    /// Nonzero censuses for `1 ≤ m ≤ m_max` plus the zero summary.
    fn census_range(&self, py: Python<'_>, m_max: u64, l: usize) -> PyResult<Py<PyAny>> {
        let c = py.detach(|| powers::census_range(&self.table, m_max, l)).py_err()?;
        to_object(py, &c)
    }

    /// Classes `[Ω^0, Ω^1, ..., Ω^(k-1)]` of factors of length `|s_n|`.
    fn factor_partition(&self, n: i64) -> PyResult<Vec<Vec<String>>> {
        let p = singular::factor_partition(&self.table, n).py_err()?;
        Ok(p.classes().map(words).collect())
    }

    fn singular_words(&self, n: i64, r: usize) -> PyResult<Vec<String>> {
        Ok(words(&singular::singular_words(&self.table, n, r).py_err()?))
    }

    /// The n-partition of `s_upto` as `(level, start, length)` triples.
    fn n_partition(&self, n: i64, upto: i64) -> PyResult<Vec<(i64, usize, usize)>> {
        let v = partition::n_partition(&self.table, n, upto).py_err()?;
        Ok(v.items.iter().map(|it| (it.level, it.start, it.length)).collect())
    }

    fn factors(&self, m: usize) -> PyResult<Vec<String>> {
        Ok(words(&oracle::stable_factor_set(&self.table, m).py_err()?))
    }

    /// Oracle scan: `{m: [bases]}` for the `l`-th powers on a certified prefix.
    fn scan_powers(&self, m_max: usize, l: usize) -> PyResult<std::collections::BTreeMap<usize, Vec<String>>> {
        let cert = oracle::certify_prefix(&self.table, m_max, l).py_err()?;
        let scan = cert
            .scan(l)
            .ok_or_else(|| VerificationError::new_err(format!("no scan for l = {l}")))?;
        Ok((1..=m_max)
            .filter(|&m| scan.count(m) > 0)
            .map(|m| (m, words(&scan.bases(m))))
            .collect())
    }

    /// Every battery for `n ≤ n_max`, one dict per check.
    fn verify(&self, py: Python<'_>, n_max: i64) -> PyResult<Py<PyAny>> {
        let out = py.detach(|| verify::verify_suite(&self.table, n_max)).py_err()?;
        to_object(py, &out)
    }
}

/// Largest `r` with `base^r` a factor of `text`.
#[pyfunction]
fn max_fractional_power(py: Python<'_>, text: &str, base: &str) -> PyResult<Py<PyAny>> {
    let r = oracle::max_fractional_power(&word(text)?, &word(base)?).py_err()?;
    fraction(py, r)
}

#[pyfunction]
fn palindromic_closure(w: &str) -> PyResult<String> {
    Ok(episturm::directive::palindromic_closure(&word(w)?).to_string())
}

#[pymodule]
fn episturm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Blocks>()?;
    m.add_function(wrap_pyfunction!(max_fractional_power, m)?)?;
    m.add_function(wrap_pyfunction!(palindromic_closure, m)?)?;
    m.add("EpisturmError", m.py().get_type::<EpisturmError>())?;
    m.add("ResourceError", m.py().get_type::<ResourceError>())?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}
