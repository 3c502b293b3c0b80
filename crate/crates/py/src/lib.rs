//! Python bindings. Inputs use the same JSON documents as the command line
//! tool, given either as a string or as plain Python dicts and lists; results
//! come back as dicts.

use std::sync::Arc;

use metricat_core as core;
use metricat_core::{Budget, BudgetExceeded, DistanceGrid, Document, ExtRat, LawConfig, MetMap, TestFamily, Variant};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(metricat, BudgetError, PyException, "A search exceeded its point or node budget.");

fn budget_err(e: BudgetExceeded) -> PyErr {
    BudgetError::new_err(e.to_string())
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn text(doc: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = doc.extract::<String>() {
        return Ok(s);
    }
    let json = doc.py().import("json")?;
    json.call_method1("dumps", (doc,))?.extract()
}

fn document(doc: &Bound<'_, PyAny>) -> PyResult<Document> {
    Document::parse(&text(doc)?).map_err(value_err)
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn eps(text: &str) -> PyResult<ExtRat> {
    text.parse().map_err(value_err)
}

fn budget(max_points: Option<usize>, max_nodes: Option<u64>) -> Budget {
    let d = Budget::default();
    Budget { max_points: max_points.unwrap_or(d.max_points), max_nodes: max_nodes.unwrap_or(d.max_nodes) }
}

fn family(grid: &str, size: usize, b: &Budget) -> PyResult<TestFamily> {
    let g = DistanceGrid::parse(grid, size).map_err(value_err)?;
    TestFamily::over_grid(&g, b).map_err(budget_err)
}

/// Lists every violated axiom of a space; empty when the space is valid.
#[pyfunction]
fn validate_space(space: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
    match document(space)?.checked_space("").map_err(value_err)? {
        Ok(_) => Ok(Vec::new()),
        Err(invalid) => Ok(invalid.0.iter().map(|v| v.to_string()).collect()),
    }
}

/// `{"space", "perm"}`: the canonical relabelling of a space.
#[pyfunction]
#[pyo3(signature = (space, max_points=None, max_nodes=None))]
fn canonical_form<'py>(space: &Bound<'py, PyAny>, max_points: Option<usize>, max_nodes: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let s = document(space)?.space("").map_err(value_err)?;
    let c = core::canonical_form(&s, &budget(max_points, max_nodes)).map_err(budget_err)?;
    to_py(space.py(), &serde_json::json!({ "space": c.space, "perm": c.perm }))
}

/// The ε-pushout of a span `{"f": A -> B, "g": A -> C}`.
#[pyfunction]
fn eps_pushout<'py>(span: &Bound<'py, PyAny>, eps_value: &str) -> PyResult<Bound<'py, PyAny>> {
    let mut doc = document(span)?;
    let f = doc.morphism("/f").map_err(value_err)?;
    let g = doc.morphism("/g").map_err(value_err)?;
    let po = core::eps_pushout(&f, &g, &eps(eps_value)?).map_err(value_err)?;
    let out = serde_json::json!({ "apex": po.apex.as_ref(), "leg_g": po.leg_g.as_slice(), "leg_f": po.leg_f.as_slice() });
    to_py(span.py(), &out)
}

/// The ε-coequalizer of a parallel pair `{"f": A -> B, "g": A -> B}`.
#[pyfunction]
fn eps_coequalizer<'py>(pair: &Bound<'py, PyAny>, eps_value: &str) -> PyResult<Bound<'py, PyAny>> {
    let mut doc = document(pair)?;
    let f = doc.morphism("/f").map_err(value_err)?;
    let g = doc.morphism("/g").map_err(value_err)?;
    let c = core::eps_coequalizer(&f, &g, &eps(eps_value)?).map_err(value_err)?;
    to_py(pair.py(), &serde_json::json!({ "apex": c.apex.as_ref(), "leg": c.leg.as_slice() }))
}

/// The ε-colimit of a finite diagram `{"objects": [...], "arrows": [...]}`.
#[pyfunction]
#[pyo3(signature = (diagram, eps_value, max_points=None, max_nodes=None))]
fn eps_colimit<'py>(
    diagram: &Bound<'py, PyAny>,
    eps_value: &str,
    max_points: Option<usize>,
    max_nodes: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let d = document(diagram)?.diagram("").map_err(value_err)?;
    let c = core::eps_colimit(&d, &eps(eps_value)?, &budget(max_points, max_nodes)).map_err(value_err)?;
    let legs: Vec<&[usize]> = c.legs.iter().map(|l| l.as_slice()).collect();
    to_py(diagram.py(), &serde_json::json!({ "apex": c.apex.as_ref(), "legs": legs }))
}

/// Whether `K` is ε-injective for `f`: `{"k": K, "f": A -> B}`.
#[pyfunction]
fn is_eps_injective<'py>(problem: &Bound<'py, PyAny>, eps_value: &str) -> PyResult<Bound<'py, PyAny>> {
    let mut doc = document(problem)?;
    let k = doc.space("/k").map_err(value_err)?;
    let f = doc.morphism("/f").map_err(value_err)?;
    let v = core::is_eps_injective(&k, &f, &eps(eps_value)?, &Budget::default()).map_err(budget_err)?;
    to_py(problem.py(), &serde_json::json!({ "injective": v.holds, "witness": v.witness }))
}

fn map_of(doc: &Bound<'_, PyAny>) -> PyResult<MetMap> {
    let mut d = document(doc)?;
    let pointer = if d.has("/f") { "/f" } else { "" };
    d.morphism(pointer).map_err(value_err)
}

/// A retraction `p` with `p∘f ∼ε id`, or `None`.
#[pyfunction]
fn eps_retraction(map: &Bound<'_, PyAny>, eps_value: &str) -> PyResult<Option<Vec<usize>>> {
    let f = map_of(map)?;
    let p = core::is_eps_split(&f, &eps(eps_value)?, &Budget::default()).map_err(budget_err)?;
    Ok(p.map(|p| p.as_slice().to_vec()))
}

/// The purity verdict of a map against every space over `grid` with at most
/// `family_size` points.
#[pyfunction]
#[pyo3(signature = (map, eps_value, variant="pure", grid="1/2,1,3/2,2,inf", family_size=2))]
fn purity<'py>(map: &Bound<'py, PyAny>, eps_value: &str, variant: &str, grid: &str, family_size: usize) -> PyResult<Bound<'py, PyAny>> {
    let f = map_of(map)?;
    let variant: Variant = variant.parse().map_err(value_err)?;
    let b = Budget::default();
    let v = core::purity(&f, &eps(eps_value)?, variant, &family(grid, family_size, &b)?, &b).map_err(budget_err)?;
    to_py(map.py(), &v)
}

/// Runs the randomized law harness; returns the full report.
#[pyfunction]
#[pyo3(signature = (seed, instances=None))]
fn run_laws(py: Python<'_>, seed: u64, instances: Option<usize>) -> PyResult<Bound<'_, PyAny>> {
    let mut cfg = LawConfig::default();
    if let Some(n) = instances {
        cfg.instances = n;
    }
    let report = py.detach(|| core::law_harness(&cfg, seed)).map_err(budget_err)?;
    to_py(py, &report)
}

/// Every space over `grid` with at most `max_size` points, one per
/// isometry class.
#[pyfunction]
fn enumerate_spaces<'py>(py: Python<'py>, grid: &str, max_size: usize) -> PyResult<Bound<'py, PyAny>> {
    let g = DistanceGrid::parse(grid, max_size).map_err(value_err)?;
    let spaces: Vec<Arc<core::Space>> =
        core::enumerate_spaces(&g, &Budget::default()).map_err(budget_err)?.into_iter().map(Arc::new).collect();
    let refs: Vec<&core::Space> = spaces.iter().map(|s| s.as_ref()).collect();
    to_py(py, &refs)
}

#[pymodule]
fn metricat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    m.add_function(wrap_pyfunction!(validate_space, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_form, m)?)?;
    m.add_function(wrap_pyfunction!(eps_pushout, m)?)?;
    m.add_function(wrap_pyfunction!(eps_coequalizer, m)?)?;
    m.add_function(wrap_pyfunction!(eps_colimit, m)?)?;
    m.add_function(wrap_pyfunction!(is_eps_injective, m)?)?;
    m.add_function(wrap_pyfunction!(eps_retraction, m)?)?;
    m.add_function(wrap_pyfunction!(purity, m)?)?;
    m.add_function(wrap_pyfunction!(run_laws, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_spaces, m)?)?;
    Ok(())
}
