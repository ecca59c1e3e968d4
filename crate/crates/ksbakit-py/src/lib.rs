//! Python bindings. Rationals come back as `fractions.Fraction`.

use ksbakit::arith::Rational;
use ksbakit::chains::{self, Chain, QeqStar};
use ksbakit::config::BlowUpSpec;
use ksbakit::contraction::{self, Contractibility};
use ksbakit::document::{parse_config, to_json, Problem};
use ksbakit::fundgroup::{self, Pi1Verdict};
use ksbakit::obstruction::{check_derivation, DerivationVerdict};
use ksbakit::tables;
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((q.numer().clone(), q.denom().clone()))
}

fn chain(entries: Vec<u64>) -> PyResult<Chain> {
    Chain::new(entries).map_err(err)
}

#[pyfunction]
fn hj_expand(p: BigInt, q: BigInt) -> PyResult<Vec<u64>> {
    Ok(chains::hj_expand(&p, &q).map_err(err)?.entries().to_vec())
}

#[pyfunction]
fn hj_eval(entries: Vec<u64>) -> PyResult<(BigInt, BigInt)> {
    Ok(chains::hj_eval(&chain(entries)?))
}

/// (n, a) or None.
#[pyfunction]
fn wahl_params(entries: Vec<u64>) -> PyResult<Option<(BigInt, BigInt)>> {
    Ok(chains::wahl_params(&chain(entries)?).map(|w| (w.n, w.a)))
}

#[pyfunction]
fn wahl_generate(max_length: usize) -> Vec<Vec<u64>> {
    chains::wahl_generate(max_length).iter().map(|c| c.entries().to_vec()).collect()
}

/// "Z3", "Z4", "Z6" or None.
#[pyfunction]
fn qeq_classify(legs: [u64; 3], center: u64) -> Option<String> {
    chains::qeq_classify(&QeqStar { legs, center }).map(|t| t.to_string())
}

/// Failing rows as (k_squared, n, a, reason).
#[pyfunction]
fn verify_tables(text: &str) -> PyResult<Vec<(u8, u64, u64, String)>> {
    let file = tables::parse_tables(text).map_err(err)?;
    Ok(tables::verify_tables(&file)
        .failures()
        .map(|r| (r.k_squared, r.n, r.a, r.reason.clone().unwrap_or_default()))
        .collect())
}

/// Runs the command line tool in-process: (exit code, stdout, stderr).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let o = ksbakit::cli::run(std::iter::once("ksbakit".to_string()).chain(args));
    (o.code, o.stdout, o.stderr)
}

#[pyclass(name = "Config", frozen)]
struct PyConfig {
    inner: Problem,
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyConfig { inner: parse_config(text).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(err)?;
        Self::from_json(&text)
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    #[getter]
    fn kz_squared(&self) -> i64 {
        self.inner.config.kz_squared
    }

    /// (name, self-intersection, genus) in file order.
    fn curves(&self) -> Vec<(String, i64, i64)> {
        self.inner.config.curves().iter().map(|c| (c.name.clone(), c.self_int, c.genus)).collect()
    }

    fn dot(&self, a: &str, b: &str) -> PyResult<i64> {
        self.inner.config.dot(a, b).map_err(err)
    }

    fn blow_up(&self, name: &str, center: Vec<(String, i64)>) -> PyResult<Self> {
        let spec = BlowUpSpec { center, new_name: name.to_string() };
        let config = self.inner.config.blow_up(&spec).map_err(err)?;
        Ok(PyConfig { inner: Problem { config, ..self.inner.clone() } })
    }

    /// Set name to its classification, e.g. "Wahl(2,1)" or "QEq Z4".
    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for s in &self.inner.sets {
            let v = match contraction::check_contractible(&self.inner.config, s).map_err(err)? {
                Contractibility::Contractible { classification, .. } => classification.to_string(),
                Contractibility::NotContractible(r) => format!("not contractible: {r}"),
            };
            d.set_item(&s.name, v)?;
        }
        Ok(d)
    }

    fn k_squared(&self) -> PyResult<i64> {
        contraction::k_squared(&self.inner.config, &self.inner.sets).map_err(err)
    }

    /// Coefficients d of f*K_X = K_Z + sum d E.
    fn discrepancies<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let class = contraction::pullback_class(&self.inner.config, &self.inner.sets).map_err(err)?;
        let d = PyDict::new(py);
        for (c, q) in &class.coefficients {
            d.set_item(c, fraction(py, q)?)?;
        }
        Ok(d)
    }

    /// (f*K).C for every curve.
    fn nef<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = contraction::nef_report(&self.inner.config, &self.inner.sets).map_err(err)?;
        let d = PyDict::new(py);
        for (c, v, _) in &r.values {
            d.set_item(c, fraction(py, v)?)?;
        }
        Ok(d)
    }

    /// "ample", "nef_not_ample", "not_nef" or "inconclusive", with detail.
    #[pyo3(signature = (fiber = None))]
    fn ample(&self, fiber: Option<&str>) -> PyResult<(String, Vec<String>)> {
        let f = match fiber {
            Some(f) => f.to_string(),
            None => self.inner.config.fibers.first().map(|f| f.name.clone()).ok_or_else(|| err("no fiber"))?,
        };
        let v =
            contraction::ample_certificate(&self.inner.config, &self.inner.sets, &f, self.inner.pullback.as_deref())
                .map_err(err)?;
        Ok(match v {
            contraction::AmpleVerdict::Ample => ("ample".into(), vec![]),
            contraction::AmpleVerdict::NefNotAmple(z) => ("nef_not_ample".into(), z),
            contraction::AmpleVerdict::NotNef { witness, .. } => ("not_nef".into(), vec![witness]),
            contraction::AmpleVerdict::Inconclusive(r) => ("inconclusive".into(), vec![r]),
        })
    }

    /// |H1| of the link of each set.
    fn link_orders(&self) -> PyResult<Vec<(String, BigInt)>> {
        self.inner
            .sets
            .iter()
            .map(|s| Ok((s.name.clone(), fundgroup::link_order(&self.inner.config, s).map_err(err)?)))
            .collect()
    }

    /// (trivial?, log)
    fn pi1(&self) -> PyResult<(bool, Vec<String>)> {
        let t = fundgroup::trivialize(&self.inner.config, &self.inner.sets, &self.inner.bridges).map_err(err)?;
        Ok((t.verdict == Pi1Verdict::Trivial, t.log))
    }

    /// (valid?, lemma name or None, message)
    fn obstruction(&self) -> PyResult<(bool, Option<String>, String)> {
        let script = self.inner.derivation.as_ref().ok_or_else(|| err("no derivation"))?;
        let v = check_derivation(&self.inner.config, script, &self.inner.sets).map_err(err)?;
        let lemma = match &v {
            DerivationVerdict::Invalid { lemma, .. } => Some(lemma.to_string()),
            DerivationVerdict::Valid { .. } => None,
        };
        Ok((v.is_valid(), lemma, v.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("<Config {} curves, K_Z^2 = {}>", self.inner.config.curves().len(), self.inner.config.kz_squared)
    }
}

#[pymodule(name = "ksbakit")]
fn ksbakit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hj_expand, m)?)?;
    m.add_function(wrap_pyfunction!(hj_eval, m)?)?;
    m.add_function(wrap_pyfunction!(wahl_params, m)?)?;
    m.add_function(wrap_pyfunction!(wahl_generate, m)?)?;
    m.add_function(wrap_pyfunction!(qeq_classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_tables, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add_class::<PyConfig>()?;
    Ok(())
}
