//! Product targets π(x) = ∏ f(x_i) on ℝ^d and the per-component analytic
//! quantities the scaling calculus needs.

use std::sync::Arc;

use statrs::function::erf::erf;

use crate::rng::RngStream;
use crate::Error;

/// One component density `f` of a product target. The interface is open so
/// sub-exponential non-Gaussian components can be added; the crate ships the
/// Gaussian component, which is what every built-in experiment uses.
pub trait Component: Send + Sync {
    fn name(&self) -> &'static str;
    /// log f(x)
    fn log_density(&self, x: f64) -> f64;
    /// (log f)'(x)
    fn score(&self, x: f64) -> f64;
    /// (log f)''(x)
    fn second_score(&self, x: f64) -> f64;
    /// Marginal CDF F(x).
    fn cdf(&self, x: f64) -> f64;
    /// Analytic Fisher information E[{(log f)'(X)}²], if known.
    fn fisher_info(&self) -> Option<f64>;
    /// One exact draw from f, for Monte Carlo diagnostics.
    fn sample(&self, stream: &mut RngStream) -> f64;
}

/// N(0, σ_f²) component.
#[derive(Debug, Clone, Copy)]
pub struct GaussianComponent {
    variance: f64,
}

impl GaussianComponent {
    pub fn new(variance: f64) -> Result<Self, Error> {
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::invalid("variance", format!("must be finite and > 0, got {variance}")));
        }
        Ok(GaussianComponent { variance })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

impl Component for GaussianComponent {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn log_density(&self, x: f64) -> f64 {
        let v = self.variance;
        -0.5 * x * x / v - 0.5 * (2.0 * std::f64::consts::PI * v).ln()
    }

    fn score(&self, x: f64) -> f64 {
        -x / self.variance
    }

    fn second_score(&self, _x: f64) -> f64 {
        -1.0 / self.variance
    }

    fn cdf(&self, x: f64) -> f64 {
        0.5 * (1.0 + erf(x / (2.0 * self.variance).sqrt()))
    }

    fn fisher_info(&self) -> Option<f64> {
        Some(1.0 / self.variance)
    }

    fn sample(&self, stream: &mut RngStream) -> f64 {
        stream
            .draw_std_normal_vec(1, self.variance.sqrt())
            .expect("variance validated at construction")[0]
    }
}

/// A d-dimensional chain position with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    coords: Vec<f64>,
}

impl StateVector {
    pub fn new(coords: Vec<f64>) -> Result<Self, Error> {
        if coords.is_empty() {
            return Err(Error::invalid("coords", "state must have at least one coordinate"));
        }
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite { context: "state coordinates" });
        }
        Ok(StateVector { coords })
    }

    pub fn constant(value: f64, d: usize) -> Result<Self, Error> {
        StateVector::new(vec![value; d])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// An iid product target π = ∏_{i=1}^d f.
#[derive(Clone)]
pub struct TargetModel {
    d: usize,
    component: Arc<dyn Component>,
}

impl TargetModel {
    pub fn new(d: usize, component: Arc<dyn Component>) -> Result<Self, Error> {
        if d == 0 {
            return Err(Error::invalid("d", "must be >= 1"));
        }
        Ok(TargetModel { d, component })
    }

    pub fn gaussian(d: usize, variance: f64) -> Result<Self, Error> {
        TargetModel::new(d, Arc::new(GaussianComponent::new(variance)?))
    }

    /// Standard N(0,1) product, the default benchmark target.
    pub fn std_gaussian(d: usize) -> Result<Self, Error> {
        TargetModel::gaussian(d, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn component(&self) -> &dyn Component {
        self.component.as_ref()
    }

    /// log π(x) = Σ_i log f(x_i).
    pub fn log_pi(&self, x: &StateVector) -> Result<f64, Error> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.dim(),
            });
        }
        let sum: f64 = x.coords().iter().map(|&c| self.component.log_density(c)).sum();
        if !sum.is_finite() {
            return Err(Error::NonFinite { context: "log density" });
        }
        Ok(sum)
    }

    /// Analytic Fisher information of the component.
    pub fn fisher_info(&self) -> Result<f64, Error> {
        self.component
            .fisher_info()
            .ok_or_else(|| Error::UnsupportedComponent(self.component.name().to_string()))
    }

    pub fn marginal_cdf(&self, x: f64) -> f64 {
        self.component.cdf(x)
    }
}
