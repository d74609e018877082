//! Dispatch between the dynamic program and simulation.

use crate::error::Result;
use crate::portfolio::ReturnParams;
use crate::ruin::{success_probabilities_dp, success_probability_mc, DensitySelector, DpGrid};

/// How success probabilities are estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Dp(DpGrid),
    /// Monte Carlo; each call draws from streams derived from `seed`, split over `workers` generators.
    Simulation {
        seed: u64,
        workers: usize,
    },
}

impl Estimator {
    pub fn is_simulation(&self) -> bool {
        matches!(self, Estimator::Simulation { .. })
    }

    /// Probabilities for each selector. Simulation uses `n` trials per selector, selector `i`
    /// drawing from stream `stream + i`; the dynamic program ignores `n` and `stream`.
    pub fn probabilities(
        &self,
        params: &ReturnParams,
        glidepath: &[f64],
        withdrawal_rate: f64,
        selectors: &[DensitySelector],
        n: u64,
        stream: u64,
    ) -> Result<Vec<f64>> {
        match *self {
            Estimator::Dp(grid) => success_probabilities_dp(params, glidepath, withdrawal_rate, &grid, selectors),
            Estimator::Simulation { seed, workers } => selectors
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let sub = stream_seed(seed, stream.wrapping_add(i as u64));
                    success_probability_mc(params, glidepath, withdrawal_rate, n, s, sub, workers)
                })
                .collect(),
        }
    }
}

/// Seed of an independent stream derived from a master seed.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03)).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D1_33E9_11EB_D3A5);
    z ^ (z >> 31)
}
