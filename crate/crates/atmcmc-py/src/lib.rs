//! Python bindings for the `atmcmc` sampler library.
//!
//! Exposes the target/proposal types, single-chain runs, the optimal-scaling
//! calculus, and the KS diagnostic. Build with
//! `cargo build -p atmcmc-py --release` and import the produced cdylib as
//! `atmcmc_py` (see `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use atmcmc::samplers::run_chain;
use atmcmc::scaling::{
    asymptotic_acceptance_atmcmc, asymptotic_acceptance_rwmh, diffusion_speed_atmcmc,
    diffusion_speed_rwmh, expected_min_exp, optimize_scaling,
};
use atmcmc::{KernelKind, ProposalSpec, QuadratureSpec, RngStream, StateVector, TargetModel};

fn err(e: atmcmc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Product target with iid one-dimensional marginals.
#[pyclass(name = "TargetModel")]
struct PyTargetModel {
    inner: TargetModel,
}

#[pymethods]
impl PyTargetModel {
    /// d-dimensional product of N(0, variance) marginals.
    #[staticmethod]
    #[pyo3(signature = (d, variance = 1.0))]
    fn gaussian(d: usize, variance: f64) -> PyResult<Self> {
        Ok(PyTargetModel {
            inner: TargetModel::gaussian(d, variance).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn log_pi(&self, x: Vec<f64>) -> PyResult<f64> {
        let state = StateVector::new(x).map_err(err)?;
        self.inner.log_pi(&state).map_err(err)
    }

    fn fisher_info(&self) -> PyResult<f64> {
        self.inner.fisher_info().map_err(err)
    }

    /// CDF of the one-dimensional marginal.
    fn marginal_cdf(&self, x: f64) -> f64 {
        self.inner.marginal_cdf(x)
    }
}

/// Kernel kind plus proposal scaling l (per-step scale is l / sqrt(d)).
#[pyclass(name = "ProposalSpec")]
struct PyProposalSpec {
    inner: ProposalSpec,
}

#[pymethods]
impl PyProposalSpec {
    /// kernel is one of "atmcmc", "rwmh", "atmcmc_scaled"; c is required for
    /// (and only for) the scaled variant.
    #[new]
    #[pyo3(signature = (kernel, l, d, c = None))]
    fn new(kernel: &str, l: f64, d: usize, c: Option<Vec<f64>>) -> PyResult<Self> {
        let kind: KernelKind = kernel.parse().map_err(err)?;
        let inner = match (kind, c) {
            (KernelKind::AtmcmcScaled, Some(c)) => ProposalSpec::scaled(l, d, c),
            (KernelKind::AtmcmcScaled, None) => Err(atmcmc::Error::invalid(
                "c",
                "atmcmc_scaled requires a coordinate scale vector",
            )),
            (kind, None) => ProposalSpec::new(kind, l, d),
            (_, Some(_)) => Err(atmcmc::Error::invalid(
                "c",
                "coordinate scales only apply to atmcmc_scaled",
            )),
        }
        .map_err(err)?;
        Ok(PyProposalSpec { inner })
    }

    #[getter]
    fn kernel(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn l(&self) -> f64 {
        self.inner.l
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    /// Per-coordinate proposal standard deviation l / sqrt(d).
    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }
}

/// Run one chain and return a dict with the thinned trace, acceptance rate,
/// final state and exact randomness accounting.
#[pyfunction]
#[pyo3(name = "run_chain", signature = (model, spec, x0, n_iter, seed, stream_id = 0, thin = 1))]
#[allow(clippy::too_many_arguments)]
fn run_chain_py<'py>(
    py: Python<'py>,
    model: &PyTargetModel,
    spec: &PyProposalSpec,
    x0: Vec<f64>,
    n_iter: u64,
    seed: u64,
    stream_id: u64,
    thin: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let start = StateVector::new(x0).map_err(err)?;
    let mut stream = RngStream::new(seed, stream_id);
    let run = run_chain(&model.inner, &spec.inner, &start, n_iter, &mut stream, thin)
        .map_err(err)?;
    let out = PyDict::new(py);
    let trace: Vec<Vec<f64>> = run.trace.iter().map(|s| s.coords().to_vec()).collect();
    out.set_item("trace", trace)?;
    out.set_item("acceptance_rate", run.acceptance_rate())?;
    out.set_item("final_state", run.final_state.coords().to_vec())?;
    out.set_item("continuous_draws", run.draws.continuous)?;
    out.set_item("sign_bit_draws", run.draws.sign_bits)?;
    Ok(out)
}

/// Two-sided KS distance between `samples` and the N(0, variance) CDF.
#[pyfunction]
#[pyo3(signature = (samples, variance = 1.0))]
fn ks_statistic_gaussian(samples: Vec<f64>, variance: f64) -> PyResult<f64> {
    let model = TargetModel::gaussian(1, variance).map_err(err)?;
    atmcmc::diagnostics::ks_statistic(&samples, |x| model.marginal_cdf(x)).map_err(err)
}

/// Diffusion speed h(l) of the limiting Langevin diffusion.
#[pyfunction]
fn diffusion_speed(kernel: &str, l: f64, fisher_info: f64) -> PyResult<f64> {
    let quad = QuadratureSpec::default();
    match kernel.parse().map_err(err)? {
        KernelKind::Rwmh => diffusion_speed_rwmh(l, fisher_info).map_err(err),
        KernelKind::Atmcmc => diffusion_speed_atmcmc(l, fisher_info, &quad).map_err(err),
        KernelKind::AtmcmcScaled => Err(PyValueError::new_err(
            "diffusion speed is defined for the atmcmc and rwmh kernels",
        )),
    }
}

/// Dimension-free limiting acceptance rate at scaling l.
#[pyfunction]
fn asymptotic_acceptance(kernel: &str, l: f64, fisher_info: f64) -> PyResult<f64> {
    let quad = QuadratureSpec::default();
    match kernel.parse().map_err(err)? {
        KernelKind::Rwmh => asymptotic_acceptance_rwmh(l, fisher_info).map_err(err),
        KernelKind::Atmcmc => asymptotic_acceptance_atmcmc(l, fisher_info, &quad).map_err(err),
        KernelKind::AtmcmcScaled => Err(PyValueError::new_err(
            "asymptotic acceptance is defined for the atmcmc and rwmh kernels",
        )),
    }
}

/// Maximize h(l); returns a dict with l_opt, h_at_opt and alpha_opt.
#[pyfunction]
fn optimal_scaling<'py>(py: Python<'py>, kernel: &str, fisher_info: f64) -> PyResult<Bound<'py, PyDict>> {
    let quad = QuadratureSpec::default();
    let kind: KernelKind = kernel.parse().map_err(err)?;
    let res = optimize_scaling(kind, fisher_info, &quad).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("kernel", res.kernel.as_str())?;
    out.set_item("l_opt", res.l_opt)?;
    out.set_item("h_at_opt", res.h_at_opt)?;
    out.set_item("alpha_opt", res.alpha_opt)?;
    Ok(out)
}

/// E[min(1, exp(X))] for X ~ N(mu, sigma^2), in closed form.
#[pyfunction]
#[pyo3(name = "expected_min_exp")]
fn expected_min_exp_py(mu: f64, sigma: f64) -> PyResult<f64> {
    expected_min_exp(mu, sigma).map_err(err)
}

#[pymodule]
fn atmcmc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTargetModel>()?;
    m.add_class::<PyProposalSpec>()?;
    m.add_function(wrap_pyfunction!(run_chain_py, m)?)?;
    m.add_function(wrap_pyfunction!(ks_statistic_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_speed, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_acceptance, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_scaling, m)?)?;
    m.add_function(wrap_pyfunction!(expected_min_exp_py, m)?)?;
    m.add("RNG_ALGORITHM", atmcmc::RNG_ALGORITHM)?;
    Ok(())
}
