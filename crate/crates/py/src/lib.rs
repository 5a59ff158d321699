//! Python bindings: a single `Oracle` class exposing the independence
//! backends together with the boundary/lattice/decomposition algorithms
//! and the verification helpers.
//!
//! Nodes are 1-based integers on the Python side, matching the printed
//! convention of the Rust CLI; `Oracle.labels` gives the display labels.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use ci_lattice::ci::{elementary_ci_check, enumerate_ci, general_ci_query};
use ci_lattice::graphtools;
use ci_lattice::lattice::{compute_lattice, compute_mb, full_decomposition, sparse_decomposition, Decomposition};
use ci_lattice::oracles::{
    non_graphical_gaussian, studeny_graphoid, CovarianceSpec, SampleMatrix, UndirectedGraph,
};
use ci_lattice::stats;
use ci_lattice::verify::{check_axioms, check_axioms_sampled};
use ci_lattice::{CITriple, Error, GroundSet, IndependenceOracle, VarSet, DEFAULT_TOL_CI};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Parse(_) | Error::TooLarge(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Accepts a single 1-based node or a sequence of them.
#[derive(FromPyObject)]
enum Nodes {
    One(i64),
    Many(Vec<i64>),
}

fn node_index(ground: &GroundSet, node: i64) -> PyResult<usize> {
    if node < 1 || node as usize > ground.size() {
        return Err(PyValueError::new_err(format!(
            "node {node} out of range 1..={}",
            ground.size()
        )));
    }
    Ok(node as usize - 1)
}

fn to_set(ground: &GroundSet, nodes: Option<Nodes>) -> PyResult<VarSet> {
    let mut out = VarSet::EMPTY;
    match nodes {
        None => {}
        Some(Nodes::One(n)) => out = out.with(node_index(ground, n)?),
        Some(Nodes::Many(v)) => {
            for n in v {
                out = out.with(node_index(ground, n)?);
            }
        }
    }
    Ok(out)
}

fn from_set(s: VarSet) -> Vec<u64> {
    s.iter().map(|i| i as u64 + 1).collect()
}

fn matrix_from_rows(rows: Vec<Vec<f64>>) -> PyResult<nalgebra::DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("matrix rows must be nonempty and rectangular"));
    }
    Ok(nalgebra::DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn decomposition_dict<'py>(py: Python<'py>, dec: &Decomposition) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("j", dec.node() as u64 + 1)?;
    let lattices = PyList::empty(py);
    for l in dec.lattices() {
        lattices.append((from_set(l.minimum()), from_set(l.maximum())))?;
    }
    out.set_item("lattices", lattices)?;
    out.set_item("k", dec.lattices().len())?;
    out.set_item("complete", dec.complete())?;
    out.set_item("covered_total", dec.covered_total())?;
    if let Some(t) = dec.sparse_order() {
        out.set_item("t", t)?;
    }
    Ok(out)
}

/// An independence oracle plus the lattice algorithms over it.
#[pyclass]
struct Oracle {
    inner: Arc<dyn IndependenceOracle>,
    /// Present for the exact-Gaussian backends; enables
    /// partial_correlation and regression_coefficients.
    spec: Option<CovarianceSpec>,
}

impl Oracle {
    fn of(inner: Arc<dyn IndependenceOracle>) -> Oracle {
        Oracle { inner, spec: None }
    }

    fn of_spec(spec: CovarianceSpec, tol: f64) -> Oracle {
        Oracle {
            inner: Arc::new(spec.exact_oracle_with_tol(tol)),
            spec: Some(spec),
        }
    }

    fn ground(&self) -> &GroundSet {
        self.inner.ground()
    }

    fn need_spec(&self) -> PyResult<&CovarianceSpec> {
        self.spec
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("this oracle has no covariance model"))
    }
}

#[pymethods]
impl Oracle {
    /// Graph-separation oracle over `d` nodes with 1-based edges.
    #[staticmethod]
    fn graph(d: usize, edges: Vec<(i64, i64)>) -> PyResult<Oracle> {
        let ground = GroundSet::new(d).map_err(to_py_err)?;
        let mut idx = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            idx.push((node_index(&ground, u)?, node_index(&ground, v)?));
        }
        let graph = UndirectedGraph::new(ground, &idx).map_err(to_py_err)?;
        Ok(Oracle::of(Arc::new(graph.separation_oracle())))
    }

    /// The path graph 1 - 2 - ... - d.
    #[staticmethod]
    fn path(d: usize) -> PyResult<Oracle> {
        let graph = UndirectedGraph::path(d).map_err(to_py_err)?;
        Ok(Oracle::of(Arc::new(graph.separation_oracle())))
    }

    /// Exact Gaussian oracle from a covariance matrix (list of rows).
    #[staticmethod]
    #[pyo3(signature = (matrix, tol=DEFAULT_TOL_CI))]
    fn from_covariance(matrix: Vec<Vec<f64>>, tol: f64) -> PyResult<Oracle> {
        let spec = CovarianceSpec::from_covariance(matrix_from_rows(matrix)?).map_err(to_py_err)?;
        Ok(Oracle::of_spec(spec, tol))
    }

    /// Exact Gaussian oracle from a precision matrix.
    #[staticmethod]
    #[pyo3(signature = (matrix, tol=DEFAULT_TOL_CI))]
    fn from_precision(matrix: Vec<Vec<f64>>, tol: f64) -> PyResult<Oracle> {
        let spec = CovarianceSpec::from_precision(matrix_from_rows(matrix)?).map_err(to_py_err)?;
        Ok(Oracle::of_spec(spec, tol))
    }

    /// Thresholded sample-partial-correlation oracle from an n x d data
    /// matrix.
    #[staticmethod]
    fn from_samples(data: Vec<Vec<f64>>, tau: f64) -> PyResult<Oracle> {
        let m = SampleMatrix::new(matrix_from_rows(data)?).map_err(to_py_err)?;
        Ok(Oracle::of(Arc::new(m.oracle(tau).map_err(to_py_err)?)))
    }

    /// The classical four-element compositional graphoid that is not
    /// probabilistically representable (labels a, b, c, d).
    #[staticmethod]
    fn studeny() -> Oracle {
        Oracle::of(Arc::new(studeny_graphoid().oracle()))
    }

    /// The seven-variable Gaussian whose independence structure no
    /// undirected graph represents.
    #[staticmethod]
    #[pyo3(signature = (tol=DEFAULT_TOL_CI))]
    fn non_graphical_gaussian(tol: f64) -> Oracle {
        Oracle::of_spec(non_graphical_gaussian(), tol)
    }

    /// A Gaussian oracle faithful to the given graph (seeded).
    #[staticmethod]
    #[pyo3(signature = (d, edges, seed=0, tol=DEFAULT_TOL_CI))]
    fn faithful_gaussian(d: usize, edges: Vec<(i64, i64)>, seed: u64, tol: f64) -> PyResult<Oracle> {
        let ground = GroundSet::new(d).map_err(to_py_err)?;
        let mut idx = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            idx.push((node_index(&ground, u)?, node_index(&ground, v)?));
        }
        let graph = UndirectedGraph::new(ground, &idx).map_err(to_py_err)?;
        let spec = graphtools::faithful_gaussian(&graph, seed).map_err(to_py_err)?;
        Ok(Oracle::of_spec(spec, tol))
    }

    /// Number of nodes.
    #[getter]
    fn d(&self) -> usize {
        self.ground().size()
    }

    /// Display labels, indexed by 1-based node id minus one.
    #[getter]
    fn labels(&self) -> Vec<String> {
        self.ground().labels().to_vec()
    }

    /// Graphoid queries answered so far.
    #[getter]
    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }

    /// Is A independent of B given C?
    #[pyo3(signature = (a, b, c=None))]
    fn query(&self, a: Nodes, b: Nodes, c: Option<Nodes>) -> PyResult<bool> {
        let g = self.ground();
        let (a, b, c) = (to_set(g, Some(a))?, to_set(g, Some(b))?, to_set(g, c)?);
        self.inner.query(a, b, c).map_err(to_py_err)
    }

    /// The Markov boundary m(j;S); S defaults to all other nodes.
    #[pyo3(signature = (j, s=None))]
    fn markov_boundary(&self, j: i64, s: Option<Nodes>) -> PyResult<Vec<u64>> {
        let g = self.ground();
        let j = node_index(g, j)?;
        let s = match s {
            Some(s) => to_set(g, Some(s))?,
            None => g.all_but(j),
        };
        Ok(from_set(compute_mb(&self.inner, j, s).map_err(to_py_err)?))
    }

    /// The neighbourhood lattice of j relative to S as a pair (m, M).
    #[pyo3(signature = (j, s=None))]
    fn lattice(&self, j: i64, s: Option<Nodes>) -> PyResult<(Vec<u64>, Vec<u64>)> {
        let g = self.ground();
        let j = node_index(g, j)?;
        let s = match s {
            Some(s) => to_set(g, Some(s))?,
            None => g.all_but(j),
        };
        let lat = compute_lattice(&self.inner, j, s).map_err(to_py_err)?;
        Ok((from_set(lat.minimum()), from_set(lat.maximum())))
    }

    /// The full lattice decomposition of j.
    fn decompose<'py>(&self, py: Python<'py>, j: i64) -> PyResult<Bound<'py, PyDict>> {
        let j = node_index(self.ground(), j)?;
        let dec = full_decomposition(&self.inner, j).map_err(to_py_err)?;
        decomposition_dict(py, &dec)
    }

    /// The sparse lattice decomposition of j of order t.
    fn sparse<'py>(&self, py: Python<'py>, j: i64, t: usize) -> PyResult<Bound<'py, PyDict>> {
        let j = node_index(self.ground(), j)?;
        let dec = sparse_decomposition(&self.inner, j, t).map_err(to_py_err)?;
        decomposition_dict(py, &dec)
    }

    /// Decides A ⫫ B | C through boundary reduction, returning the
    /// verdict and the per-pair witness boundaries.
    #[pyo3(signature = (a, b, c=None))]
    fn ci<'py>(&self, py: Python<'py>, a: Nodes, b: Nodes, c: Option<Nodes>) -> PyResult<Bound<'py, PyDict>> {
        let g = self.ground();
        let triple = CITriple::new(to_set(g, Some(a))?, to_set(g, Some(b))?, to_set(g, c)?)
            .map_err(to_py_err)?;
        let verdict = general_ci_query(&self.inner, &triple).map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("independent", verdict.independent)?;
        let witnesses = PyList::empty(py);
        for w in &verdict.witnesses {
            witnesses.append((w.a as u64 + 1, w.b as u64 + 1, from_set(w.boundary)))?;
        }
        out.set_item("witnesses", witnesses)?;
        out.set_item("queries", verdict.total_queries)?;
        Ok(out)
    }

    /// Elementary check j ⫫ i | C via the boundary criterion.
    #[pyo3(signature = (j, i, c=None))]
    fn ci_elementary(&self, j: i64, i: i64, c: Option<Nodes>) -> PyResult<bool> {
        let g = self.ground();
        let verdict = elementary_ci_check(&self.inner, node_index(g, j)?, node_index(g, i)?, to_set(g, c)?)
            .map_err(to_py_err)?;
        Ok(verdict.independent)
    }

    /// All elementary CI statements involving j, from the full
    /// decomposition: returns (count, statements), the list truncated at
    /// `max` when given.
    #[pyo3(signature = (j, max=None))]
    #[allow(clippy::type_complexity)]
    fn enumerate_ci(&self, j: i64, max: Option<usize>) -> PyResult<(u128, Vec<(u64, Vec<u64>)>)> {
        let j = node_index(self.ground(), j)?;
        let dec = full_decomposition(&self.inner, j).map_err(to_py_err)?;
        let stream = enumerate_ci(&dec);
        let limit = max.unwrap_or(usize::MAX);
        let statements: Vec<(u64, Vec<u64>)> = stream
            .iter()
            .take(limit)
            .map(|(i, c)| (i as u64 + 1, from_set(c)))
            .collect();
        Ok((stream.count(), statements))
    }

    /// Checks the graphoid axioms G1-G7 (and G8 when
    /// `weak_transitivity`); exhaustive for d <= 5, sampled otherwise.
    #[pyo3(signature = (weak_transitivity=false, budget=2000, seed=0))]
    fn check_axioms<'py>(
        &self,
        py: Python<'py>,
        weak_transitivity: bool,
        budget: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report = if self.ground().size() <= 5 {
            check_axioms(&self.inner, weak_transitivity).map_err(to_py_err)?
        } else {
            check_axioms_sampled(&self.inner, weak_transitivity, budget, seed).map_err(to_py_err)?
        };
        let out = PyDict::new(py);
        out.set_item("all_hold", report.all_hold())?;
        let results = PyList::empty(py);
        for r in &report.results {
            let entry = PyDict::new(py);
            entry.set_item("axiom", &r.axiom)?;
            entry.set_item("status", format!("{:?}", r.status).to_lowercase())?;
            entry.set_item("instances_checked", r.instances_checked)?;
            entry.set_item("counterexamples", r.counterexamples.len())?;
            results.append(entry)?;
        }
        out.set_item("results", results)?;
        Ok(out)
    }

    /// Exact partial correlation rho(i,j|S) (covariance-backed oracles
    /// only).
    #[pyo3(signature = (i, j, s=None))]
    fn partial_correlation(&self, i: i64, j: i64, s: Option<Nodes>) -> PyResult<f64> {
        let spec = self.need_spec()?;
        let g = self.ground();
        let rho = stats::partial_correlation(spec, node_index(g, i)?, node_index(g, j)?, to_set(g, s)?)
            .map_err(to_py_err)?;
        Ok(rho.value)
    }

    /// Regression coefficients of j on S (covariance-backed oracles
    /// only), in ascending node order of S.
    fn regression_coefficients(&self, j: i64, s: Nodes) -> PyResult<Vec<f64>> {
        let spec = self.need_spec()?;
        let g = self.ground();
        stats::regression_coefficients(spec, node_index(g, j)?, to_set(g, Some(s))?).map_err(to_py_err)
    }

    /// The covariance matrix as a list of rows (covariance-backed
    /// oracles only).
    fn covariance(&self) -> PyResult<Vec<Vec<f64>>> {
        let spec = self.need_spec()?;
        let m = spec.covariance();
        Ok((0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Oracle(d={}, queries={})", self.ground().size(), self.inner.query_count())
    }
}

/// `(d-1) * 2^(d-2)`: the number of possible elementary CI statements
/// for one node over `d` nodes.
#[pyfunction]
fn count_possible_ci(d: usize) -> PyResult<u128> {
    ci_lattice::ci::count_possible_ci(d).map_err(to_py_err)
}

#[pymodule]
fn ci_lattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Oracle>()?;
    m.add_function(wrap_pyfunction!(count_possible_ci, m)?)?;
    m.add("DEFAULT_TOL_CI", DEFAULT_TOL_CI)?;
    Ok(())
}
