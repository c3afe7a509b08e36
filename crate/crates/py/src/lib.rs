//! Python bindings. Structured values cross the boundary as plain Python
//! objects (dicts, lists, ints, strings) in the same JSON shapes the `m0n`
//! command line tool reads and writes.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde_json::{json, Value};

use m0n_core::chow::{generic_orbit_class, orbit_class_of_type, tree_cycle_class};
use m0n_core::configurations::{cross_ratio as core_cross_ratio, orbit_form as core_orbit_form, type_of as core_type_of, SetPartition};
use m0n_core::exact_geometry::DEFAULT_PRIME;
use m0n_core::hilbert::{generic_orbit_hilbert, generic_orbit_hilbert_on, push_hilbert_along_partition, tree_hilbert};
use m0n_core::json::{self as mj, TreeInput};
use m0n_core::operads::{check_procyclic_axioms, signature_of, AxiomConfig};
use m0n_core::oracles::{
    boundary_membership_check, chow_agreement_check, degeneration_fiber_check, hilbert_agreement_check,
};
use m0n_core::sampling::{random_generic_configuration, rng};
use m0n_core::trees::enumerate_stable_trees;
use m0n_core::{Configuration, Error, Label, LabelSet};

create_exception!(m0n, M0nError, PyException, "Domain error; `args` is (name, message).");

fn err(e: Error) -> PyErr {
    M0nError::new_err((e.name(), e.to_string()))
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for m0n_core::Result<T> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let text: String = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&text).map_err(|e| err(Error::Parse(e.to_string())))
}

fn tree_input(obj: &Bound<'_, PyAny>) -> PyResult<TreeInput> {
    mj::tree_from_json(&from_py(obj)?).or_raise()
}

fn labels(v: Vec<u32>) -> LabelSet {
    v.into_iter().map(Label).collect()
}

fn config(s: &str) -> PyResult<Configuration> {
    s.parse().or_raise()
}

/// Cross-ratio of four distinct points as a string, e.g. `"2"` for `"0,1,inf,2"`.
#[pyfunction]
fn cross_ratio(x: &str) -> PyResult<String> {
    Ok(core_cross_ratio(&config(x)?).or_raise()?.to_string())
}

/// Coincidence type of a configuration, e.g. `"1,2|3|4"`.
#[pyfunction]
fn type_of(x: &str) -> PyResult<String> {
    Ok(core_type_of(&config(x)?).to_string())
}

#[pyfunction]
fn orbit_form(py: Python<'_>, x: &str) -> PyResult<Py<PyAny>> {
    let f = core_orbit_form(&config(x)?).or_raise()?;
    let mut v = mj::form_to_json(&f);
    v["monomials"] = json!(f.to_monomial_string());
    to_py(py, &v)
}

fn tree_out(t: &TreeInput) -> Value {
    match t {
        TreeInput::Bare(t) => mj::tree_to_json(t),
        TreeInput::Decorated(d) => mj::decorated_tree_to_json(d),
    }
}

#[pyfunction]
fn stabilize(py: Python<'_>, tree: &Bound<'_, PyAny>, keep: Vec<u32>) -> PyResult<Py<PyAny>> {
    let keep = labels(keep);
    let out = match tree_input(tree)? {
        TreeInput::Bare(t) => TreeInput::Bare(t.stabilize(&keep).or_raise()?),
        TreeInput::Decorated(d) => TreeInput::Decorated(d.stabilize(&keep).or_raise()?),
    };
    to_py(py, &tree_out(&out))
}

#[pyfunction]
#[pyo3(signature = (left, right, star = "*"))]
fn glue(py: Python<'_>, left: &Bound<'_, PyAny>, right: &Bound<'_, PyAny>, star: &str) -> PyResult<Py<PyAny>> {
    let star: Label = star.parse().or_raise()?;
    let out = match (tree_input(left)?, tree_input(right)?) {
        (TreeInput::Decorated(a), TreeInput::Decorated(b)) => TreeInput::Decorated(a.glue(&b, star).or_raise()?),
        (a, b) => TreeInput::Bare(a.tree().glue(&b.tree(), star).or_raise()?),
    };
    to_py(py, &tree_out(&out))
}

#[pyfunction]
fn enumerate_trees(py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
    let trees = enumerate_stable_trees(n).or_raise()?;
    to_py(py, &Value::Array(trees.iter().map(mj::tree_to_json).collect()))
}

/// Whether some node separates `k` from `l`, which must partition the markings.
#[pyfunction]
fn separating_node_exists(tree: &Bound<'_, PyAny>, k: Vec<u32>, l: Vec<u32>) -> PyResult<bool> {
    tree_input(tree)?.tree().separating_node_exists(&labels(k), &labels(l)).or_raise()
}

/// Hilbert polynomial of a tree, a coincidence type, or the generic orbit closure on `n` points.
#[pyfunction]
#[pyo3(signature = (*, tree = None, type_ = None, n = None))]
fn hilbert_poly(
    py: Python<'_>,
    tree: Option<&Bound<'_, PyAny>>,
    type_: Option<&str>,
    n: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let p = match (tree, type_, n) {
        (Some(t), None, None) => tree_hilbert(&tree_input(t)?.tree()).or_raise()?,
        (None, Some(ty), None) => {
            let p: SetPartition = ty.parse().or_raise()?;
            let l = p.num_parts();
            if l < 3 {
                return Err(err(Error::TooDegenerateType));
            }
            let q = generic_orbit_hilbert_on(&(1..=l as u32).map(Label).collect()).or_raise()?;
            push_hilbert_along_partition(&q, &p).or_raise()?
        }
        (None, None, Some(n)) => generic_orbit_hilbert(n).or_raise()?,
        _ => return Err(err(Error::Parse("give exactly one of tree, type_, n".into()))),
    };
    to_py(py, &mj::poly_to_json(&p))
}

#[pyfunction]
#[pyo3(signature = (*, tree = None, type_ = None, n = None))]
fn chow_class(
    py: Python<'_>,
    tree: Option<&Bound<'_, PyAny>>,
    type_: Option<&str>,
    n: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let c = match (tree, type_, n) {
        (Some(t), None, None) => tree_cycle_class(&tree_input(t)?.tree()).or_raise()?,
        (None, Some(ty), None) => orbit_class_of_type(&ty.parse().or_raise()?).or_raise()?,
        (None, None, Some(n)) => generic_orbit_class(n).or_raise()?,
        _ => return Err(err(Error::Parse("give exactly one of tree, type_, n".into()))),
    };
    to_py(py, &mj::chow_to_json(&c))
}

#[pyfunction]
fn signature(py: Python<'_>, tree: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    match tree_input(tree)? {
        TreeInput::Decorated(d) => to_py(py, &mj::signature_to_json(&signature_of(&d).or_raise()?)),
        TreeInput::Bare(_) => Err(err(Error::Parse("signature needs positions for every special point".into()))),
    }
}

fn report(py: Python<'_>, passed: bool, mut v: Value) -> PyResult<Py<PyAny>> {
    v["passed"] = json!(passed);
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (n = 4, seed = 0, prime = DEFAULT_PRIME))]
fn verify_hilbert(py: Python<'_>, n: usize, seed: u64, prime: u64) -> PyResult<Py<PyAny>> {
    let r = hilbert_agreement_check(n, prime, seed).or_raise()?;
    report(py, r.mismatched == 0, json!({ "report": r }))
}

#[pyfunction]
#[pyo3(signature = (n = 5, seed = 0))]
fn verify_chow(py: Python<'_>, n: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let r = chow_agreement_check(n, seed).or_raise()?;
    report(py, r.mismatched == 0, json!({ "report": r }))
}

#[pyfunction]
#[pyo3(signature = (n = 5, seed = 0, samples = 200))]
fn verify_degeneration(py: Python<'_>, n: usize, seed: u64, samples: usize) -> PyResult<Py<PyAny>> {
    let x = random_generic_configuration(&mut rng(seed), n);
    let reports = (1..n)
        .map(|i| degeneration_fiber_check(n, &x, i, samples, seed.wrapping_add(i as u64)))
        .collect::<m0n_core::Result<Vec<_>>>()
        .or_raise()?;
    let ok = reports.iter().all(|r| r.passed());
    report(py, ok, json!({ "x": x.to_string(), "reports": reports }))
}

#[pyfunction]
#[pyo3(signature = (n = 5, seed = 0, samples = 200))]
fn verify_boundary(py: Python<'_>, n: usize, seed: u64, samples: usize) -> PyResult<Py<PyAny>> {
    let x = random_generic_configuration(&mut rng(seed), n);
    let r = boundary_membership_check(&x, samples, seed).or_raise()?;
    report(py, r.passed(), json!({ "x": x.to_string(), "report": r }))
}

#[pyfunction]
#[pyo3(signature = (max_n = 6, seed = 0, samples = 1))]
fn verify_operads(py: Python<'_>, max_n: usize, seed: u64, samples: usize) -> PyResult<Py<PyAny>> {
    if !(4..=8).contains(&max_n) {
        return Err(err(Error::OutOfRange(format!("max_n = {max_n} (need 4..=8)"))));
    }
    let r = py.detach(|| check_procyclic_axioms(&AxiomConfig { max_labels: max_n, samples, seed }));
    let v = serde_json::to_value(&r).expect("report serializes");
    report(py, r.passed(), v)
}

#[pymodule]
fn m0n(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("M0nError", m.py().get_type::<M0nError>())?;
    m.add_function(wrap_pyfunction!(cross_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(type_of, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_form, m)?)?;
    m.add_function(wrap_pyfunction!(stabilize, m)?)?;
    m.add_function(wrap_pyfunction!(glue, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_trees, m)?)?;
    m.add_function(wrap_pyfunction!(separating_node_exists, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_poly, m)?)?;
    m.add_function(wrap_pyfunction!(chow_class, m)?)?;
    m.add_function(wrap_pyfunction!(signature, m)?)?;
    m.add_function(wrap_pyfunction!(verify_hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(verify_chow, m)?)?;
    m.add_function(wrap_pyfunction!(verify_degeneration, m)?)?;
    m.add_function(wrap_pyfunction!(verify_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(verify_operads, m)?)?;
    Ok(())
}
