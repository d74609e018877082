//! Gradient and Hessian of the success probability and its maximization by Newton's method or
//! gradient ascent inside the box `[MVA + 1e-4, 1]`.

mod climb;
mod driver;
mod gradient;
mod hessian;
mod newton;

pub use climb::ClimbOutcome;
pub use driver::{IterationRecord, Optimum, Phase};
pub use gradient::{effective_magnitude, GradientVector};
pub use hessian::HessianMatrix;
pub use newton::{check_interior, newton_step, MAX_CONDITION};

use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::objective::Objective;

/// Update rule for the main iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Newton,
    GradientAscent,
}

type Observer<'a> = Box<dyn FnMut(&IterationRecord) + 'a>;

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub estimator: Estimator,
    /// Convergence threshold on the largest effective gradient element.
    pub epsilon: f64,
    /// Base simulation sample size `N`: success probabilities use `4N`, climbing `2N`, special probabilities `N`.
    pub base_sample_n: u64,
    /// Significance level of the non-inferiority test that stops simulation climbing.
    pub alpha_noninferiority: f64,
    /// Significance level of the test that zeroes simulation gradient elements; 1 disables it.
    pub alpha_zero: f64,
    /// Iteration cap; `None` uses 25 for Newton and 200 for gradient ascent.
    pub max_iterations: Option<usize>,
    /// Step cap of the climb performed before the main iterations.
    pub initial_climb_cap: usize,
}

impl OptimizerConfig {
    pub fn new(method: Method, estimator: Estimator, epsilon: f64) -> Self {
        Self {
            method,
            estimator,
            epsilon,
            base_sample_n: 1,
            alpha_noninferiority: 0.5,
            alpha_zero: 1.0,
            max_iterations: None,
            initial_climb_cap: 50,
        }
    }

    pub fn iteration_cap(&self) -> usize {
        self.max_iterations.unwrap_or(match self.method {
            Method::Newton => 25,
            Method::GradientAscent => 200,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!("epsilon {} must be positive", self.epsilon)));
        }
        for a in [self.alpha_noninferiority, self.alpha_zero] {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidParams(format!("significance level {a} must lie in (0, 1]")));
            }
        }
        if self.base_sample_n == 0 {
            return Err(Error::EmptySample);
        }
        if let Estimator::Dp(grid) = self.estimator {
            grid.validate()?;
        }
        Ok(())
    }

    fn n_probability(&self) -> u64 {
        4 * self.base_sample_n
    }

    fn n_climb(&self) -> u64 {
        2 * self.base_sample_n
    }

    fn n_special(&self) -> u64 {
        self.base_sample_n
    }
}

/// Optimizer state bound to one objective; hands out distinct simulation streams to every call.
pub struct Optimizer<'a, O: Objective + ?Sized> {
    objective: &'a O,
    config: OptimizerConfig,
    stream: u64,
    observer: Option<Observer<'a>>,
}

impl<'a, O: Objective + ?Sized> Optimizer<'a, O> {
    pub fn new(objective: &'a O, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        objective.params().validate()?;
        Ok(Self { objective, config, stream: 0, observer: None })
    }

    /// Registers a callback receiving every progress record.
    pub fn with_observer(mut self, f: impl FnMut(&IterationRecord) + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    fn next_streams(&mut self, count: usize) -> u64 {
        let s = self.stream;
        self.stream += count as u64;
        s
    }

    fn evaluate(&mut self, glidepath: &[f64], selectors: &[crate::ruin::DensitySelector], n: u64) -> Result<Vec<f64>> {
        let stream = self.next_streams(selectors.len());
        self.objective.probabilities(&self.config.estimator, glidepath, selectors, n, stream)
    }

    /// Success probability of `glidepath` at the `4N` sample size.
    pub fn probability(&mut self, glidepath: &[f64]) -> Result<f64> {
        let n = self.config.n_probability();
        Ok(self.evaluate(glidepath, &[crate::ruin::DensitySelector::STANDARD], n)?[0])
    }

    fn clamped(&self, glidepath: &[f64]) -> Vec<f64> {
        let mut gp = glidepath.to_vec();
        self.objective.params().clamp_all(&mut gp);
        gp
    }
}
