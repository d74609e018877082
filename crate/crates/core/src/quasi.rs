//! Standardized withdrawal curves, the single-period critical ratio, and the two-period grid
//! comparison used to show the success probability is not quasi-concave.

use crate::error::{Error, Result};
use crate::horizon::neumaier_sum;
use crate::portfolio::ReturnParams;
use crate::ruin::{success_probability_mc, DensitySelector};
use crate::special::norm_cdf;

/// Standardized withdrawal rate `(W_R - m(α)) / √v(α)`; ruin in the first period iff `z_1` is at most this.
pub fn zf0(params: &ReturnParams, alpha: f64, withdrawal_rate: f64) -> f64 {
    (withdrawal_rate - params.mean(alpha)) / params.variance(alpha).sqrt()
}

/// `d zf0 / dα`.
pub fn zf0_derivative(params: &ReturnParams, alpha: f64, withdrawal_rate: f64) -> f64 {
    let n = withdrawal_rate - params.mean(alpha);
    let v = params.variance(alpha);
    let vp = params.variance_prime(alpha);
    -params.mean_prime() / v.sqrt() - 0.5 * n * vp / v.powf(1.5)
}

/// `d² zf0 / dα²`.
pub fn zf0_second_derivative(params: &ReturnParams, alpha: f64, withdrawal_rate: f64) -> f64 {
    let n = withdrawal_rate - params.mean(alpha);
    let np = -params.mean_prime();
    let v = params.variance(alpha);
    let vp = params.variance_prime(alpha);
    let vpp = params.variance_second();
    -np * vp / v.powf(1.5) - 0.5 * n * vpp / v.powf(1.5) + 0.75 * n * vp * vp / v.powf(2.5)
}

/// Residual `2 m' v + (W_R - m) v'`, which vanishes exactly where `zf0` is stationary.
pub fn critical_residual(params: &ReturnParams, alpha: f64, withdrawal_rate: f64) -> f64 {
    2.0 * params.mean_prime() * params.variance(alpha)
        + (withdrawal_rate - params.mean(alpha)) * params.variance_prime(alpha)
}

/// The unique ratio where `zf0` is stationary. The stationarity condition is linear in α
/// because the quadratic terms cancel.
pub fn critical_alpha_single_period(params: &ReturnParams, withdrawal_rate: f64) -> Result<f64> {
    let c0 = critical_residual(params, 0.0, withdrawal_rate);
    let c1 = critical_residual(params, 1.0, withdrawal_rate) - c0;
    if c1 == 0.0 || !c1.is_finite() {
        return Err(Error::InvalidParams("stationarity condition of zf0 is degenerate".into()));
    }
    Ok(-c0 / c1)
}

/// Integration grid over the first standardized return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_low: f64,
    pub z_high: f64,
    pub k: usize,
}

impl GridSpec {
    pub fn new(z_low: f64, z_high: f64, k: usize) -> Result<Self> {
        if !(z_low < 0.0 && 0.0 < z_high) || k == 0 {
            return Err(Error::InvalidParams(format!("invalid grid [{z_low}, {z_high}] with {k} rectangles")));
        }
        Ok(Self { z_low, z_high, k })
    }

    pub fn width(&self) -> f64 {
        (self.z_high - self.z_low) / self.k as f64
    }

    /// Rectangle midpoints and exact normal probabilities.
    fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let w = self.width();
        (0..self.k).map(move |r| {
            let a = self.z_low + r as f64 * w;
            let b = self.z_low + (r + 1) as f64 * w;
            (0.5 * (a + b), norm_cdf(b) - norm_cdf(a))
        })
    }
}

/// Ruin probability over two periods given the first standardized return `z1`.
pub fn conditional_ruin(params: &ReturnParams, glidepath: [f64; 2], withdrawal_rate: f64, z1: f64) -> f64 {
    let [a1, a2] = glidepath;
    if z1 <= zf0(params, a1, withdrawal_rate) {
        return 1.0;
    }
    let r1 = params.variance(a1).sqrt() * z1 + params.mean(a1);
    let rf1 = withdrawal_rate / (r1 - withdrawal_rate);
    norm_cdf((rf1 - params.mean(a2)) / params.variance(a2).sqrt())
}

/// Grid approximation of `P_NR(a) - P_NR(b)` for two-period glidepaths.
pub fn two_period_difference(
    params: &ReturnParams,
    gp_a: [f64; 2],
    gp_b: [f64; 2],
    withdrawal_rate: f64,
    grid: &GridSpec,
) -> f64 {
    neumaier_sum(grid.cells().map(|(z, pr)| {
        pr * (conditional_ruin(params, gp_b, withdrawal_rate, z) - conditional_ruin(params, gp_a, withdrawal_rate, z))
    }))
}

/// Grid approximation of the two-period success probability.
pub fn two_period_probability(params: &ReturnParams, gp: [f64; 2], withdrawal_rate: f64, grid: &GridSpec) -> f64 {
    neumaier_sum(grid.cells().map(|(z, pr)| pr * (1.0 - conditional_ruin(params, gp, withdrawal_rate, z))))
}

/// How the three probabilities of a counterexample are estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerifyMethod {
    Grid(GridSpec),
    Mc { n: u64, seed: u64, workers: usize },
}

/// Probabilities of two glidepaths and a convex combination of them.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub gp_1: Vec<f64>,
    pub gp_2: Vec<f64>,
    pub gp_c: Vec<f64>,
    pub lambda: f64,
    pub p_1: f64,
    pub p_2: f64,
    pub p_c: f64,
    /// Sample size behind each probability in simulation.
    pub n: Option<u64>,
}

impl CounterexampleReport {
    /// True when the combination does strictly worse than both endpoints.
    pub fn is_counterexample(&self) -> bool {
        self.p_c < self.p_1.min(self.p_2)
    }

    /// Header and one data row of comma-separated values.
    pub fn to_csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(" ");
        format!(
            "lambda,gp_1,gp_2,gp_c,p_1,p_2,p_c,counterexample\n{},{},{},{},{:.10},{:.10},{:.10},{}\n",
            self.lambda,
            join(&self.gp_1),
            join(&self.gp_2),
            join(&self.gp_c),
            self.p_1,
            self.p_2,
            self.p_c,
            self.is_counterexample()
        )
    }
}

/// Evaluates `gp_1`, `gp_2` and `λ·gp_1 + (1-λ)·gp_2`.
pub fn verify_counterexample(
    params: &ReturnParams,
    gp_1: &[f64],
    gp_2: &[f64],
    lambda: f64,
    withdrawal_rate: f64,
    method: VerifyMethod,
) -> Result<CounterexampleReport> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParams(format!("lambda {lambda} is outside [0, 1]")));
    }
    if gp_1.len() != gp_2.len() || gp_1.is_empty() {
        return Err(Error::InvalidParams("glidepaths must be nonempty and of equal length".into()));
    }
    let gp_c: Vec<f64> = gp_1.iter().zip(gp_2).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
    let (probs, n) = match method {
        VerifyMethod::Grid(grid) => {
            let pair = |g: &[f64]| -> Result<[f64; 2]> {
                g.try_into().map_err(|_| Error::InvalidParams("the grid method needs two-period glidepaths".into()))
            };
            let p = [gp_1, gp_2, &gp_c]
                .iter()
                .map(|g| Ok(two_period_probability(params, pair(g)?, withdrawal_rate, &grid)))
                .collect::<Result<Vec<_>>>()?;
            (p, None)
        }
        VerifyMethod::Mc { n, seed, workers } => {
            let p = [gp_1, gp_2, &gp_c]
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let s = crate::estimator::stream_seed(seed, i as u64);
                    success_probability_mc(params, g, withdrawal_rate, n, &DensitySelector::STANDARD, s, workers)
                })
                .collect::<Result<Vec<_>>>()?;
            (p, Some(n))
        }
    };
    Ok(CounterexampleReport {
        gp_1: gp_1.to_vec(),
        gp_2: gp_2.to_vec(),
        gp_c,
        lambda,
        p_1: probs[0],
        p_2: probs[1],
        p_c: probs[2],
        n,
    })
}
