//! Python bindings for the main nctriple types and operations: special
//! functions, the model traces, convergence classification, spectral
//! dimension, and the cocycle checks.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use nctriple::cocycle::{cocycle_law_residual, coboundary_fit, Cocycle};
use nctriple::error::Error;
use nctriple::grid::Grid1D;
use nctriple::group::TripleParams;
use nctriple::spectral::{
    compactness_criterion, residue_affine, residue_dilation, series_zr, spectral_dimension,
    trace_affine_scalar, trace_dilation, trace_untwisted_h, untwisted_test_element, DilationSpec,
    Method, TraceReport,
};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Precision(m) => PyArithmeticError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_method(method: &str) -> PyResult<Method> {
    match method {
        "closed" => Ok(Method::ClosedForm),
        "quadrature" => Ok(Method::Quadrature),
        "series" => Ok(Method::Series),
        _ => Err(PyValueError::new_err(format!("unknown method {method:?}"))),
    }
}

#[pyclass(name = "TraceReport")]
#[derive(Clone)]
struct PyTraceReport {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    method: String,
    #[pyo3(get)]
    tail_estimate: f64,
    #[pyo3(get)]
    classification: String,
}

impl From<TraceReport> for PyTraceReport {
    fn from(r: TraceReport) -> Self {
        PyTraceReport {
            value: r.value,
            method: r.method.to_string(),
            tail_estimate: r.tail_estimate,
            classification: r.classification.to_string(),
        }
    }
}

#[pymethods]
impl PyTraceReport {
    fn __repr__(&self) -> String {
        format!(
            "TraceReport(value={}, method='{}', tail_estimate={}, classification='{}')",
            self.value, self.method, self.tail_estimate, self.classification
        )
    }
}

/// Gamma function (real argument, poles return nan).
#[pyfunction]
fn gamma(x: f64) -> f64 {
    nctriple::specfun::gamma_fn(x)
}

/// Gauss hypergeometric 2F1(a, b; c; z) for z < 1.
#[pyfunction]
fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> PyResult<f64> {
    nctriple::specfun::hyp2f1(a, b, c, z).map_err(to_py_err)
}

/// Affine-model trace for a unit algebra pairing.
#[pyfunction]
#[pyo3(signature = (eta, omega, s, pairing=1.0, method="closed"))]
fn trace_affine(
    eta: f64,
    omega: f64,
    s: f64,
    pairing: f64,
    method: &str,
) -> PyResult<PyTraceReport> {
    trace_affine_scalar(eta, omega, s, pairing, parse_method(method)?)
        .map(Into::into)
        .map_err(to_py_err)
}

/// Residue of the affine trace at the s = 2 pole.
#[pyfunction]
fn affine_residue(omega: f64, pairing: f64) -> f64 {
    residue_affine(omega, pairing)
}

/// Dilation-model trace in n dimensions.
#[pyfunction]
#[pyo3(signature = (n, eta, omega, s, fhat0=1.0, method="closed"))]
fn dilation_trace(
    n: usize,
    eta: f64,
    omega: f64,
    s: f64,
    fhat0: f64,
    method: &str,
) -> PyResult<PyTraceReport> {
    trace_dilation(&DilationSpec { n, s, eta, omega, fhat0 }, parse_method(method)?)
        .map(Into::into)
        .map_err(to_py_err)
}

/// Residue of the dilation trace at the s = n + 1 pole.
#[pyfunction]
fn dilation_residue(n: usize, omega: f64, fhat0: f64) -> f64 {
    residue_dilation(n, omega, fhat0)
}

/// Integer-model trace series sum with its convergence classification.
#[pyfunction]
#[pyo3(signature = (eta, omega, s, phi_factor=1.0))]
fn zr_series(eta: f64, omega: f64, s: f64, phi_factor: f64) -> PyResult<PyTraceReport> {
    let p = TripleParams::new(eta, omega, s, 0.0).map_err(to_py_err)?;
    Ok(series_zr(&p, Complex64::new(phi_factor, 0.0)).into())
}

/// Trace of the untwisted comparison representation on the standard
/// flat test element.
#[pyfunction]
#[pyo3(signature = (s, eps_flat=0.5))]
fn untwisted_trace(s: f64, eps_flat: f64) -> PyResult<PyTraceReport> {
    let f = untwisted_test_element().map_err(to_py_err)?;
    trace_untwisted_h(&f, s, eps_flat).map(Into::into).map_err(to_py_err)
}

/// Convergence classification of the theta^c compactness integral.
#[pyfunction]
fn compactness(eta: f64, omega: f64, s: f64, c: f64) -> PyResult<(f64, String)> {
    let p = TripleParams::new(eta, omega, s, c).map_err(to_py_err)?;
    let g = nctriple::group::make_group(nctriple::group::GroupKind::RealLine, -8.0, 8.0, 33)
        .map_err(to_py_err)?;
    let r = compactness_criterion(&g, &p);
    Ok((r.value, r.classification.to_string()))
}

/// Spectral dimension of one of the worked models:
/// "affine", "zr", "dilation:N" or "untwisted".
#[pyfunction]
#[pyo3(signature = (example, eta=1.0, omega=-1.0))]
fn dimension(example: &str, eta: f64, omega: f64) -> PyResult<(f64, f64)> {
    let (trace_fn, window): (Box<dyn Fn(f64) -> nctriple::Result<TraceReport>>, (f64, f64)) =
        if example == "affine" {
            (
                Box::new(move |s| trace_affine_scalar(eta, omega, s, 1.0, Method::ClosedForm)),
                (1.3, 3.2),
            )
        } else if example == "zr" {
            (
                Box::new(move |s| {
                    Ok(series_zr(&TripleParams::new(eta, omega, s, 0.0)?, Complex64::new(1.0, 0.0)))
                }),
                (1.5, 3.0),
            )
        } else if example == "untwisted" {
            let f = untwisted_test_element().map_err(to_py_err)?;
            (Box::new(move |s| trace_untwisted_h(&f, s, 0.5)), (0.5, 2.0))
        } else if let Some(n) = example.strip_prefix("dilation:") {
            let n: usize = n
                .parse()
                .map_err(|_| PyValueError::new_err(format!("bad dilation order in {example:?}")))?;
            (
                Box::new(move |s| {
                    trace_dilation(&DilationSpec { n, s, eta, omega, fhat0: 1.0 }, Method::ClosedForm)
                }),
                (n as f64 + 0.3, n as f64 + 2.2),
            )
        } else {
            return Err(PyValueError::new_err(format!("unknown example {example:?}")));
        };
    let est = spectral_dimension(trace_fn.as_ref(), window).map_err(to_py_err)?;
    Ok((est.p_hat, est.uncertainty))
}

/// Worst cocycle-law residual of c(r) = exp(-rate * r) over standard
/// test pairs; zero rate gives the constant cocycle.
#[pyfunction]
fn cocycle_residual(rate: f64) -> PyResult<f64> {
    let c = Cocycle::scalar_real(move |r| (-rate * r).exp());
    let pairs = [(0.5, 0.25), (-1.0, 0.5), (1.5, -2.0), (0.0, 0.7), (2.0, 1.5)];
    cocycle_law_residual(&c, (-8.0, 8.0), &pairs).map_err(to_py_err)
}

/// Round-trip a planted coboundary with witness b(x) = 1 + exp(-x^2);
/// returns the fit residual.
#[pyfunction]
fn coboundary_roundtrip() -> PyResult<f64> {
    let base = Grid1D::symmetric(4.0, 161).map_err(to_py_err)?;
    let witness: Vec<f64> = base.points().map(|x| 1.0 + (-x * x).exp()).collect();
    let planted = Cocycle::from_coboundary(base, &witness).map_err(to_py_err)?;
    let fit = coboundary_fit(&planted, &[-1.0, -0.5, 0.5, 1.0]).map_err(to_py_err)?;
    fit.map(|w| w.residual)
        .ok_or_else(|| PyArithmeticError::new_err("planted coboundary not recovered"))
}

#[pymodule]
fn nctriple_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTraceReport>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(hyp2f1, m)?)?;
    m.add_function(wrap_pyfunction!(trace_affine, m)?)?;
    m.add_function(wrap_pyfunction!(affine_residue, m)?)?;
    m.add_function(wrap_pyfunction!(dilation_trace, m)?)?;
    m.add_function(wrap_pyfunction!(dilation_residue, m)?)?;
    m.add_function(wrap_pyfunction!(zr_series, m)?)?;
    m.add_function(wrap_pyfunction!(untwisted_trace, m)?)?;
    m.add_function(wrap_pyfunction!(compactness, m)?)?;
    m.add_function(wrap_pyfunction!(dimension, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle_residual, m)?)?;
    m.add_function(wrap_pyfunction!(coboundary_roundtrip, m)?)?;
    Ok(())
}
