//! Monte Carlo estimate of the success probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{ruin_factor_step, DensitySelector, RuinState};
use crate::density::{pdf_unchecked, DensityKind};
use crate::error::{Error, Result};
use crate::portfolio::{MomentBundle, ReturnParams};

const SCAN_POINTS: usize = 100_000;
const SCAN_WIDTH_SD: f64 = 12.0;
const SUPPORT_CUTOFF: f64 = 1e-12;

/// Sampling box for rejection sampling: uniform `x` in `[x_low, x_high]`, uniform height in `[0, y_high]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionBox {
    pub x_low: f64,
    pub x_high: f64,
    pub y_high: f64,
}

/// Scans the density on a grid around its mean to find a box covering its support and peak.
pub fn rejection_bounds(kind: DensityKind, mo: &MomentBundle) -> Result<RejectionBox> {
    if kind == DensityKind::Standard {
        return Err(Error::InvalidSelector("the normal density is sampled directly".into()));
    }
    crate::density::pdf(kind, mo, mo.m)?;
    let sd = mo.sd();
    let lo = mo.m - SCAN_WIDTH_SD * sd;
    let h = 2.0 * SCAN_WIDTH_SD * sd / (SCAN_POINTS - 1) as f64;
    let mut first = None;
    let mut last = 0;
    let mut peak: f64 = 0.0;
    for i in 0..SCAN_POINTS {
        let p = pdf_unchecked(kind, mo, lo + i as f64 * h);
        peak = peak.max(p);
        if p > SUPPORT_CUTOFF {
            first.get_or_insert(i);
            last = i;
        }
    }
    let first = first.unwrap_or(0);
    Ok(RejectionBox { x_low: lo + (first as f64 - 3.0) * h, x_high: lo + (last as f64 + 3.0) * h, y_high: 1.05 * peak })
}

enum Sampler {
    Normal { m: f64, sd: f64 },
    Reject { kind: DensityKind, mo: MomentBundle, bx: RejectionBox },
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        match self {
            Sampler::Normal { m, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                Ok(m + sd * z)
            }
            Sampler::Reject { kind, mo, bx } => loop {
                let x = bx.x_low + (bx.x_high - bx.x_low) * rng.random::<f64>();
                let y = bx.y_high * rng.random::<f64>();
                let p = pdf_unchecked(*kind, mo, x);
                if p > bx.y_high {
                    return Err(Error::Envelope { kind: *kind, alpha: mo.alpha, pdf: p, height: bx.y_high });
                }
                if y <= p {
                    return Ok(x);
                }
            },
        }
    }
}

/// Seed of one worker's generator, derived from the master seed and worker index.
pub(crate) fn worker_seed(master: u64, worker: u64) -> u64 {
    let mut z = master ^ worker.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D1_33E9_11EB_D3A5);
    z ^ (z >> 31)
}

/// Fraction of `n` simulated trajectories that avoid ruin.
///
/// Trials are split across `workers` independent generators; the estimate depends only on
/// `(seed, workers)`, not on the thread pool.
pub fn success_probability_mc(
    params: &ReturnParams,
    glidepath: &[f64],
    withdrawal_rate: f64,
    n: u64,
    selector: &DensitySelector,
    seed: u64,
    workers: usize,
) -> Result<f64> {
    params.validate()?;
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if glidepath.is_empty() {
        return Err(Error::InvalidParams("glidepath is empty".into()));
    }
    selector.validate(glidepath.len())?;
    let samplers = glidepath
        .iter()
        .enumerate()
        .map(|(t, &a)| {
            let mo = params.moments(params.clamp(a));
            match selector.kind_at(t) {
                DensityKind::Standard => Ok(Sampler::Normal { m: mo.m, sd: mo.sd() }),
                kind => Ok(Sampler::Reject { kind, mo, bx: rejection_bounds(kind, &mo)? }),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let workers = workers.max(1) as u64;
    let survivors = (0..workers)
        .into_par_iter()
        .map(|w| {
            let trials = n / workers + u64::from(w < n % workers);
            let mut rng = ChaCha8Rng::seed_from_u64(worker_seed(seed, w));
            let mut alive = 0u64;
            'trial: for _ in 0..trials {
                let mut rf = withdrawal_rate;
                for s in &samplers {
                    match ruin_factor_step(rf, s.draw(&mut rng)?) {
                        RuinState::Alive(next) => rf = next,
                        RuinState::Ruined => continue 'trial,
                    }
                }
                alive += 1;
            }
            Ok(alive)
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(survivors.iter().sum::<u64>() as f64 / n as f64)
}
