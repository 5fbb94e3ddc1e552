//! Python extension module exposing the main sparsepad types and operations.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::collections::BTreeSet;

use sparsepad::analysis::{
    eps2_diagonal, mi_bruteforce as mi_bruteforce_rs, pad_stats as pad_stats_rs, solve_p_star,
    LeakageBudget, LeakageSide,
};
use sparsepad::gf::{rng_from_seed, FieldSpec};
use sparsepad::matrix::{DenseMatrix, SparseMatrix as SparseMatrixRs};
use sparsepad::pad::{
    decode_pair as decode_pair_rs, encode as encode_rs, sample_source, PadParams, SourceModel,
};
use sparsepad::scheme::{threshold_formula, SchemeConfig};
use sparsepad::sim::{run_simulation, TimingModel};

fn value_err(e: sparsepad::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A sparse matrix over GF(q) in coordinate form.
#[pyclass(name = "SparseMatrix", from_py_object)]
#[derive(Clone)]
struct PySparseMatrix {
    inner: SparseMatrixRs,
}

#[pymethods]
impl PySparseMatrix {
    /// Build from (row, col, value) triples; values in 1..q.
    #[staticmethod]
    fn from_triples(
        q: u32,
        rows: usize,
        cols: usize,
        triples: Vec<(usize, usize, u32)>,
    ) -> PyResult<Self> {
        let field = FieldSpec::new(q).map_err(value_err)?;
        let inner = SparseMatrixRs::from_triples(field, rows, cols, &triples).map_err(value_err)?;
        Ok(PySparseMatrix { inner })
    }

    /// Sample an i.i.d. source matrix with zero-probability `s`.
    #[staticmethod]
    fn random(q: u32, rows: usize, cols: usize, s: f64, seed: u64) -> PyResult<Self> {
        let field = FieldSpec::new(q).map_err(value_err)?;
        let model = SourceModel::new(s, field).map_err(value_err)?;
        let mut rng = rng_from_seed(seed);
        let inner = sample_source(&model, rows, cols, &mut rng).map_err(value_err)?;
        Ok(PySparseMatrix { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PySparseMatrix {
            inner: SparseMatrixRs::from_text(text).map_err(value_err)?,
        })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.field().q()
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn sparsity(&self) -> f64 {
        self.inner.measure_sparsity()
    }

    fn triples(&self) -> Vec<(usize, usize, u32)> {
        self.inner
            .iter()
            .map(|(r, c, v)| (r, c, v.value()))
            .collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Multiply by a dense x given row-major with `k` columns; returns the
    /// row-major product.
    #[pyo3(signature = (x, k = 1))]
    fn matvec(&self, x: Vec<u32>, k: usize) -> PyResult<Vec<u32>> {
        let xm =
            DenseMatrix::from_values(self.inner.field(), self.inner.cols(), k, &x).map_err(value_err)?;
        let y = self.inner.matvec(&xm).map_err(value_err)?;
        Ok(y.data().iter().map(|v| v.value()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "SparseMatrix(q={}, rows={}, cols={}, nnz={})",
            self.q(),
            self.rows(),
            self.cols(),
            self.nnz()
        )
    }
}

/// Encode A into (B1, B2) = (R, A + R) with the dependent sparse pad.
#[pyfunction]
#[pyo3(signature = (a, p_z0, p_nz0, seed = 0))]
fn encode(a: &PySparseMatrix, p_z0: f64, p_nz0: f64, seed: u64) -> PyResult<(PySparseMatrix, PySparseMatrix)> {
    let params = PadParams::new(p_z0, p_nz0, a.inner.field()).map_err(value_err)?;
    let mut rng = rng_from_seed(seed);
    let (b1, b2) = encode_rs(&a.inner, &params, &mut rng).map_err(value_err)?;
    Ok((PySparseMatrix { inner: b1 }, PySparseMatrix { inner: b2 }))
}

/// Recover A = B2 - B1.
#[pyfunction]
fn decode_pair(b1: &PySparseMatrix, b2: &PySparseMatrix) -> PyResult<PySparseMatrix> {
    Ok(PySparseMatrix {
        inner: decode_pair_rs(&b1.inner, &b2.inner).map_err(value_err)?,
    })
}

/// Closed-form sparsity and leakage for source sparsity `s` and the two pad
/// probabilities: dict with s_padded, s_pad, eps1, eps2 (q-ary units).
#[pyfunction]
fn pad_stats<'py>(py: Python<'py>, q: u32, s: f64, p_z0: f64, p_nz0: f64) -> PyResult<Bound<'py, PyDict>> {
    let field = FieldSpec::new(q).map_err(value_err)?;
    let params = PadParams::new(p_z0, p_nz0, field).map_err(value_err)?;
    let stats = pad_stats_rs(s, &params).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("s_padded", stats.s_padded)?;
    d.set_item("s_pad", stats.s_pad)?;
    d.set_item("eps1", stats.eps1)?;
    d.set_item("eps2", stats.eps2)?;
    Ok(d)
}

/// Exact mutual information from the full joint PMF; `which` is "pad" (R)
/// or "padded" (A+R).
#[pyfunction]
fn mi_bruteforce(q: u32, s: f64, p_z0: f64, p_nz0: f64, which: &str) -> PyResult<f64> {
    let field = FieldSpec::new(q).map_err(value_err)?;
    let params = PadParams::new(p_z0, p_nz0, field).map_err(value_err)?;
    let side = match which {
        "pad" => LeakageSide::Pad,
        "padded" => LeakageSide::Padded,
        other => {
            return Err(PyValueError::new_err(format!(
                "which must be 'pad' or 'padded', got '{other}'"
            )))
        }
    };
    mi_bruteforce_rs(s, &params, side).map_err(value_err)
}

/// Largest pad parameter p meeting the relative leakage budget.
#[pyfunction]
fn p_star(q: u32, s: f64, eps_rel: f64, n2: usize, alpha: usize, z: usize) -> PyResult<f64> {
    let field = FieldSpec::new(q).map_err(value_err)?;
    let budget = LeakageBudget::new(eps_rel, z, n2, alpha).map_err(value_err)?;
    solve_p_star(s, field, &budget).map_err(value_err)
}

/// Pad leakage eps2 at pad parameter p (diagonal regime).
#[pyfunction]
fn eps2(q: u32, s: f64, p: f64) -> PyResult<f64> {
    FieldSpec::new(q).map_err(value_err)?;
    Ok(eps2_diagonal(s, q, p))
}

/// Response thresholds (K_u, K_t) for the two clusters.
#[pyfunction]
fn recovery_thresholds(n1: usize, alpha_u: usize, n2: usize, alpha_t: usize) -> (usize, usize) {
    (threshold_formula(n1, alpha_u), threshold_formula(n2, alpha_t))
}

/// Run one simulation; returns a dict with decode times, consumed response
/// counts, thresholds, and the recovered y (row-major).
#[pyfunction]
#[pyo3(signature = (a, x, p, n1, n2, alpha_u = 1, alpha_t = 1, z = 1, seed = 0, full_stragglers_trusted = vec![]))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    a: &PySparseMatrix,
    x: Vec<u32>,
    p: f64,
    n1: usize,
    n2: usize,
    alpha_u: usize,
    alpha_t: usize,
    z: usize,
    seed: u64,
    full_stragglers_trusted: Vec<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let field = a.inner.field();
    let xm = DenseMatrix::from_values(field, a.inner.cols(), 1, &x).map_err(value_err)?;
    let params = PadParams::diagonal(p, field).map_err(value_err)?;
    let cfg = SchemeConfig {
        untrusted_workers: n1,
        untrusted_layers: alpha_u,
        trusted_workers: n2,
        trusted_layers: alpha_t,
        collusion_bound: z,
        field,
    };
    cfg.validate().map_err(value_err)?;
    let mut timing = TimingModel::new(1.0);
    timing.full_stragglers_trusted = full_stragglers_trusted
        .into_iter()
        .collect::<BTreeSet<usize>>();
    timing.validate(&cfg).map_err(value_err)?;
    let mut rng = rng_from_seed(seed);
    let report = run_simulation(&a.inner, &xm, &params, &cfg, &timing, &mut rng).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("decode_time", report.decode_time)?;
    d.set_item("responses_untrusted", report.responses_consumed_untrusted)?;
    d.set_item("responses_trusted", report.responses_consumed_trusted)?;
    d.set_item("k_u", report.threshold_untrusted)?;
    d.set_item("k_t", report.threshold_trusted)?;
    d.set_item(
        "y",
        report
            .recovered
            .data()
            .iter()
            .map(|v| v.value())
            .collect::<Vec<u32>>(),
    )?;
    d.set_item("s_pad_empirical", report.sparsity.empirical_pad)?;
    d.set_item("s_padded_empirical", report.sparsity.empirical_padded)?;
    Ok(d)
}

#[pymodule]
fn sparsepad_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySparseMatrix>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode_pair, m)?)?;
    m.add_function(wrap_pyfunction!(pad_stats, m)?)?;
    m.add_function(wrap_pyfunction!(mi_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(p_star, m)?)?;
    m.add_function(wrap_pyfunction!(eps2, m)?)?;
    m.add_function(wrap_pyfunction!(recovery_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
