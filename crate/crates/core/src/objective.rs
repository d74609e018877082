//! Objectives the optimizer can maximize: the fixed-horizon success probability and
//! mortality-weighted mixtures of it.

use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::portfolio::ReturnParams;
use crate::ruin::DensitySelector;

/// A success probability that is linear in per-selector probabilities, so gradients and Hessians
/// follow from the special-density probabilities.
pub trait Objective: Sync {
    fn params(&self) -> &ReturnParams;

    /// Number of equity ratios in the glidepath.
    fn dimension(&self) -> usize;

    /// Objective values with the special densities of each selector substituted.
    fn probabilities(
        &self,
        estimator: &Estimator,
        glidepath: &[f64],
        selectors: &[DensitySelector],
        n: u64,
        stream: u64,
    ) -> Result<Vec<f64>>;

    /// Whether ratio `t` can affect the objective; inactive ratios get zero derivatives.
    fn active(&self, t: usize) -> bool {
        t < self.dimension()
    }

    fn check_len(&self, glidepath: &[f64]) -> Result<()> {
        if glidepath.len() != self.dimension() {
            return Err(Error::InvalidParams(format!(
                "glidepath has {} ratios, expected {}",
                glidepath.len(),
                self.dimension()
            )));
        }
        Ok(())
    }
}

/// Probability of no ruin over a known number of withdrawals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedHorizon {
    pub params: ReturnParams,
    pub withdrawal_rate: f64,
    pub horizon: usize,
}

impl FixedHorizon {
    pub fn new(params: ReturnParams, withdrawal_rate: f64, horizon: usize) -> Result<Self> {
        params.validate()?;
        if horizon == 0 {
            return Err(Error::InvalidParams("horizon must be at least 1".into()));
        }
        if !(withdrawal_rate.is_finite() && withdrawal_rate > 0.0) {
            return Err(Error::InvalidParams(format!("withdrawal rate {withdrawal_rate} must be positive")));
        }
        Ok(Self { params, withdrawal_rate, horizon })
    }
}

impl Objective for FixedHorizon {
    fn params(&self) -> &ReturnParams {
        &self.params
    }

    fn dimension(&self) -> usize {
        self.horizon
    }

    fn probabilities(
        &self,
        estimator: &Estimator,
        glidepath: &[f64],
        selectors: &[DensitySelector],
        n: u64,
        stream: u64,
    ) -> Result<Vec<f64>> {
        self.check_len(glidepath)?;
        estimator.probabilities(&self.params, glidepath, self.withdrawal_rate, selectors, n, stream)
    }
}
