//! Random time of final withdrawal: the success probability weighted by the probability of each
//! horizon, with its gradient and Hessian.

use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::objective::Objective;
use crate::optimizer::{GradientVector, HessianMatrix, Optimizer, OptimizerConfig};
use crate::portfolio::ReturnParams;
use crate::ruin::DensitySelector;

const SUM_TOLERANCE: f64 = 1e-9;

/// Probabilities `p_0..p_{S_max}` that the final withdrawal happens at each time.
#[derive(Debug, Clone, PartialEq)]
pub struct MortalityDistribution {
    probabilities: Vec<f64>,
}

impl MortalityDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        Self::check_entries(&probabilities)?;
        let sum = neumaier_sum(probabilities.iter().copied());
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidMortality(format!(
                "probabilities sum to {sum}, not 1 (renormalize to rescale them)"
            )));
        }
        Ok(Self { probabilities })
    }

    /// Rescales nonnegative weights to sum to 1.
    pub fn renormalized(mut weights: Vec<f64>) -> Result<Self> {
        Self::check_entries(&weights)?;
        let sum = neumaier_sum(weights.iter().copied());
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::InvalidMortality("weights sum to zero".into()));
        }
        for w in &mut weights {
            *w /= sum;
        }
        Self::new(weights)
    }

    /// All mass on `s_max` withdrawals.
    pub fn point_mass(s_max: usize) -> Result<Self> {
        let mut p = vec![0.0; s_max + 1];
        p[s_max] = 1.0;
        Self::new(p)
    }

    fn check_entries(p: &[f64]) -> Result<()> {
        if p.len() < 2 {
            return Err(Error::InvalidMortality("need p_0 and at least one withdrawal time".into()));
        }
        if let Some((t, x)) = p.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidMortality(format!("p_{t} = {x} is not a nonnegative number")));
        }
        Ok(())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Largest possible number of withdrawals, and the glidepath length.
    pub fn s_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    /// Largest horizon with positive probability (0 if all mass is on `p_0`).
    pub fn last_positive(&self) -> usize {
        self.probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// Parses one probability per line, `p_0` first; blank lines are ignored.
    pub fn parse(text: &str, renormalize: bool) -> Result<Self> {
        let mut p = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let x: f64 = line
                .parse()
                .map_err(|_| Error::InvalidMortality(format!("line {}: '{line}' is not a number", i + 1)))?;
            p.push(x);
        }
        if renormalize {
            Self::renormalized(p)
        } else {
            Self::new(p)
        }
    }
}

/// Reads a lifetable file: one probability per line, index 0 first.
pub fn load_lifetable(path: &Path, renormalize: bool) -> Result<MortalityDistribution> {
    MortalityDistribution::parse(&crate::io::read_text(path)?, renormalize)
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `p_0 + Σ_k p_k P_NR(α_1..α_k)`, each term a fixed-horizon probability on a glidepath prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomHorizon {
    pub params: ReturnParams,
    pub withdrawal_rate: f64,
    pub mortality: MortalityDistribution,
}

impl RandomHorizon {
    pub fn new(params: ReturnParams, withdrawal_rate: f64, mortality: MortalityDistribution) -> Result<Self> {
        params.validate()?;
        if !(withdrawal_rate.is_finite() && withdrawal_rate > 0.0) {
            return Err(Error::InvalidParams(format!("withdrawal rate {withdrawal_rate} must be positive")));
        }
        Ok(Self { params, withdrawal_rate, mortality })
    }
}

impl Objective for RandomHorizon {
    fn params(&self) -> &ReturnParams {
        &self.params
    }

    fn dimension(&self) -> usize {
        self.mortality.s_max()
    }

    fn active(&self, t: usize) -> bool {
        t < self.mortality.last_positive()
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
        let p = self.mortality.probabilities();
        let s_max = self.mortality.s_max();
        let mut terms: Vec<Vec<f64>> = vec![vec![p[0]]; selectors.len()];
        for k in 1..=s_max {
            if p[k] == 0.0 {
                continue;
            }
            let restricted: Vec<_> = selectors.iter().map(|s| s.restrict(k)).collect();
            // The longest horizon keeps the caller's streams; shorter ones are offset.
            let offset = ((s_max - k) as u64) << 40;
            let probs = estimator.probabilities(
                &self.params,
                &glidepath[..k],
                self.withdrawal_rate,
                &restricted,
                n,
                stream.wrapping_add(offset),
            )?;
            for (acc, q) in terms.iter_mut().zip(probs) {
                acc.push(p[k] * q);
            }
        }
        Ok(terms.into_iter().map(neumaier_sum).collect())
    }
}

/// Success probability when the number of withdrawals is random.
pub fn success_probability_random(
    params: &ReturnParams,
    glidepath: &[f64],
    withdrawal_rate: f64,
    mortality: &MortalityDistribution,
    config: &OptimizerConfig,
) -> Result<f64> {
    let obj = RandomHorizon::new(*params, withdrawal_rate, mortality.clone())?;
    let mut opt = Optimizer::new(&obj, *config)?;
    opt.probability(glidepath)
}

/// Gradient of [`success_probability_random`], together with the probability it was built around.
pub fn gradient_random(
    params: &ReturnParams,
    glidepath: &[f64],
    withdrawal_rate: f64,
    mortality: &MortalityDistribution,
    config: &OptimizerConfig,
) -> Result<(f64, GradientVector)> {
    let obj = RandomHorizon::new(*params, withdrawal_rate, mortality.clone())?;
    let mut opt = Optimizer::new(&obj, *config)?;
    let p = opt.probability(glidepath)?;
    let g = opt.build_gradient(glidepath, p)?;
    Ok((p, g))
}

/// Hessian of [`success_probability_random`].
pub fn hessian_random(
    params: &ReturnParams,
    glidepath: &[f64],
    withdrawal_rate: f64,
    mortality: &MortalityDistribution,
    config: &OptimizerConfig,
) -> Result<HessianMatrix> {
    let obj = RandomHorizon::new(*params, withdrawal_rate, mortality.clone())?;
    let mut opt = Optimizer::new(&obj, *config)?;
    let p = opt.probability(glidepath)?;
    let g = opt.build_gradient(glidepath, p)?;
    opt.build_hessian(glidepath, p, &g)
}
