//! Probability of avoiding ruin for a glidepath under a fixed inflation-adjusted withdrawal.

mod dp;
mod mc;

pub use dp::{success_probabilities_dp, success_probability_dp};
pub use mc::{rejection_bounds, success_probability_mc, RejectionBox};

use crate::density::DensityKind;
use crate::error::{Error, Result};

/// Which time points draw their return from a special density.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct DensitySelector {
    pub gradient: [Option<usize>; 2],
    pub h1: Option<usize>,
    pub h2: Option<usize>,
}

impl DensitySelector {
    /// Every time point uses the normal density.
    pub const STANDARD: Self = Self { gradient: [None, None], h1: None, h2: None };

    pub fn gradient(t: usize) -> Self {
        Self { gradient: [Some(t), None], ..Self::STANDARD }
    }

    pub fn gradient_pair(i: usize, j: usize) -> Self {
        Self { gradient: [Some(i), Some(j)], ..Self::STANDARD }
    }

    pub fn h1(t: usize) -> Self {
        Self { h1: Some(t), ..Self::STANDARD }
    }

    pub fn h2(t: usize) -> Self {
        Self { h2: Some(t), ..Self::STANDARD }
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::STANDARD
    }

    pub fn kind_at(&self, t: usize) -> DensityKind {
        if self.gradient.contains(&Some(t)) {
            DensityKind::Gradient
        } else if self.h1 == Some(t) {
            DensityKind::HessianH1
        } else if self.h2 == Some(t) {
            DensityKind::HessianH2
        } else {
            DensityKind::Standard
        }
    }

    pub fn validate(&self, horizon: usize) -> Result<()> {
        if self.h1.is_some() && self.h2.is_some() {
            return Err(Error::InvalidSelector("only one Hessian special density may be used".into()));
        }
        let idx = self.gradient.iter().chain([&self.h1, &self.h2]).flatten();
        if let Some(t) = idx.clone().find(|&&t| t >= horizon) {
            return Err(Error::InvalidSelector(format!("time index {t} is not below the horizon {horizon}")));
        }
        if let [Some(i), Some(j)] = self.gradient {
            if i == j {
                return Err(Error::InvalidSelector(format!("gradient points must differ, both are {i}")));
            }
        }
        let gradient_used = self.gradient.iter().any(Option::is_some);
        if gradient_used && (self.h1.is_some() || self.h2.is_some()) {
            return Err(Error::InvalidSelector("gradient and Hessian densities cannot be mixed".into()));
        }
        Ok(())
    }

    /// Drops indices at or beyond `horizon`.
    pub fn restrict(&self, horizon: usize) -> Self {
        let keep = |o: Option<usize>| o.filter(|&t| t < horizon);
        Self { gradient: self.gradient.map(keep), h1: keep(self.h1), h2: keep(self.h2) }
    }
}

/// Discretization of the ruin-factor axis: bucket `b` represents ruin factor `b / precision`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpGrid {
    pub precision: u32,
    pub rf_max: f64,
}

impl DpGrid {
    pub fn new(precision: u32, rf_max: f64) -> Result<Self> {
        let g = Self { precision, rf_max };
        g.validate()?;
        Ok(g)
    }

    pub fn bucket_count(&self) -> usize {
        (self.rf_max * self.precision as f64) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision < 100 {
            return Err(Error::InvalidGrid(format!("precision {} is below 100", self.precision)));
        }
        if !(self.rf_max.is_finite() && self.rf_max > 0.0) || self.bucket_count() < 2 {
            return Err(Error::InvalidGrid(format!("rf_max {} is not usable", self.rf_max)));
        }
        Ok(())
    }

    /// Bucket holding the initial withdrawal rate, `round(W_R · precision)`.
    pub fn initial_bucket(&self, withdrawal_rate: f64) -> Result<usize> {
        let b = (withdrawal_rate * self.precision as f64 + 0.5).floor();
        if !(b >= 1.0 && (b as usize) <= self.bucket_count()) {
            return Err(Error::InvalidGrid(format!(
                "withdrawal rate {withdrawal_rate} maps to bucket {b}, outside 1..={}",
                self.bucket_count()
            )));
        }
        Ok(b as usize)
    }
}

/// Ruin factor after a withdrawal period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuinState {
    Alive(f64),
    Ruined,
}

/// Advances the ruin factor by one period: ruin iff the adjusted return does not exceed it.
pub fn ruin_factor_step(rf: f64, adjusted_return: f64) -> RuinState {
    if rf > 0.0 && adjusted_return > rf {
        RuinState::Alive(rf / (adjusted_return - rf))
    } else {
        RuinState::Ruined
    }
}
