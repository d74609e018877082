//! Backward induction over discretized ruin factors.

use rayon::prelude::*;

use super::{DensitySelector, DpGrid};
use crate::density::{CdfEval, DensityKind};
use crate::error::{Error, Result};
use crate::portfolio::ReturnParams;

const BLOCK: usize = 256;
/// Remaining mass (relative to `1 - cdf(rf)`) below which the lower tail of the expectation is dropped.
const TAIL: f64 = 1e-17;

/// Success probability `1 - V(0, W_R)` from the bucketed backward recursion.
///
/// Results do not depend on the size of the current rayon pool.
pub fn success_probability_dp(
    params: &ReturnParams,
    glidepath: &[f64],
    withdrawal_rate: f64,
    grid: &DpGrid,
    selector: &DensitySelector,
) -> Result<f64> {
    Ok(success_probabilities_dp(params, glidepath, withdrawal_rate, grid, std::slice::from_ref(selector))?[0])
}

/// Success probabilities for several selectors on one glidepath.
///
/// Selectors that agree on all time points from `t` onward share the backward steps down to `t`,
/// so each result equals the corresponding single evaluation exactly.
pub fn success_probabilities_dp(
    params: &ReturnParams,
    glidepath: &[f64],
    withdrawal_rate: f64,
    grid: &DpGrid,
    selectors: &[DensitySelector],
) -> Result<Vec<f64>> {
    params.validate()?;
    grid.validate()?;
    if glidepath.is_empty() {
        return Err(Error::InvalidParams("glidepath is empty".into()));
    }
    for s in selectors {
        s.validate(glidepath.len())?;
    }
    let ctx = Ctx { params, glidepath, prec: grid.precision as f64, start: grid.initial_bucket(withdrawal_rate)? };
    let nb = grid.bucket_count();
    let terminal = Table { v: vec![0.0; nb], uniq: vec![1, nb] };
    let mut out = vec![f64::NAN; selectors.len()];
    let group: Vec<usize> = (0..selectors.len()).collect();
    ctx.descend(glidepath.len() - 1, &terminal, &group, selectors, &mut out)?;
    Ok(out)
}

/// Ruin probabilities at one time point with the starts of their distinct runs.
struct Table {
    v: Vec<f64>,
    uniq: Vec<usize>,
}

struct Ctx<'a> {
    params: &'a ReturnParams,
    glidepath: &'a [f64],
    prec: f64,
    start: usize,
}

impl Ctx<'_> {
    /// Processes time point `t` for the selectors in `group`, given values for time `t + 1`.
    fn descend(
        &self,
        t: usize,
        next: &Table,
        group: &[usize],
        selectors: &[DensitySelector],
        out: &mut [f64],
    ) -> Result<()> {
        let mut kinds: Vec<DensityKind> = group.iter().map(|&i| selectors[i].kind_at(t)).collect();
        kinds.sort_by_key(|k| *k as u8);
        kinds.dedup();
        for kind in kinds {
            let sub: Vec<usize> = group.iter().copied().filter(|&i| selectors[i].kind_at(t) == kind).collect();
            let step = Step::new(self.params, self.glidepath[t], kind, t, self.prec)?;
            if t == 0 {
                let p = 1.0 - step.bucket(self.start, &next.v, &next.uniq);
                for i in sub {
                    out[i] = p;
                }
                continue;
            }
            let mut v = vec![0.0; next.v.len()];
            step.fill(&next.v, &next.uniq, &mut v);
            check_step(t, &v)?;
            let mut uniq = Vec::with_capacity(next.uniq.len());
            rebuild_unique(&v, &mut uniq);
            self.descend(t - 1, &Table { v, uniq }, &sub, selectors, out)?;
        }
        Ok(())
    }
}

/// One backward step at a fixed equity ratio and density.
struct Step {
    cdf: CdfEval,
    prec: f64,
    saturation: f64,
}

impl Step {
    fn new(params: &ReturnParams, alpha: f64, kind: DensityKind, t: usize, prec: f64) -> Result<Self> {
        let alpha = params.clamp(alpha);
        let mo = params.moments(alpha);
        let cdf = CdfEval::new(kind, &mo).map_err(|e| match e {
            Error::SingularTheta { alpha, .. } => Error::SingularTheta { alpha, t },
            other => other,
        })?;
        let saturation = cdf.saturation_point();
        Ok(Self { cdf, prec, saturation })
    }

    fn edge(&self, rf: f64, bucket: usize) -> f64 {
        rf * (1.0 + self.prec / (bucket as f64 + 0.5))
    }

    /// Ruin probability from bucket `b` given next-period values `vp` and their distinct-run starts `uniq`.
    fn bucket(&self, b: usize, vp: &[f64], uniq: &[usize]) -> f64 {
        let nb = vp.len();
        let rf = b as f64 / self.prec;
        let cdfval = self.cdf.eval(rf);
        let eprob = if cdfval >= 1.0 {
            vp[nb - 1]
        } else {
            // Terms whose edge lies in the saturated region contribute exactly zero.
            let first = uniq.partition_point(|&j| self.edge(rf, j) >= self.saturation);
            let mut eprob = 0.0;
            let mut rhs = 1.0;
            let tail = TAIL * (1.0 - cdfval);
            for &j in &uniq[first..] {
                if rhs - cdfval <= tail {
                    break;
                }
                let lhs = self.cdf.eval(self.edge(rf, j));
                eprob += (rhs - lhs) * vp[j - 1];
                rhs = lhs;
            }
            (eprob + (rhs - cdfval) * vp[nb - 1]) / (1.0 - cdfval)
        };
        let p = cdfval + eprob - cdfval * eprob;
        if p <= 0.5 {
            p
        } else {
            1.0 - (1.0 - cdfval) * (1.0 - eprob)
        }
    }

    /// Fills `v` bucket by bucket; once a bucket reaches 1 every higher bucket is 1.
    fn fill(&self, vp: &[f64], uniq: &[usize], v: &mut [f64]) {
        let wave = BLOCK * rayon::current_num_threads().max(1);
        let mut done = false;
        for (w, chunk) in v.chunks_mut(wave).enumerate() {
            if done {
                chunk.fill(1.0);
                continue;
            }
            let base = w * wave;
            let hit: Vec<bool> = chunk
                .par_chunks_mut(BLOCK)
                .enumerate()
                .map(|(k, blk)| {
                    let off = base + k * BLOCK;
                    for (i, slot) in blk.iter_mut().enumerate() {
                        *slot = self.bucket(off + i + 1, vp, uniq);
                        if *slot >= 1.0 {
                            blk[i + 1..].fill(1.0);
                            return true;
                        }
                    }
                    false
                })
                .collect();
            if let Some(k) = hit.iter().position(|&h| h) {
                let from = (k + 1) * BLOCK;
                if from < chunk.len() {
                    chunk[from..].fill(1.0);
                }
                done = true;
            }
        }
    }
}

fn check_step(t: usize, v: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x < prev - 1e-15 || x > 1.0 + 2e-16 {
            return Err(Error::NonMonotone { t, bucket: i + 1, prev, value: x });
        }
        prev = x;
    }
    let last = v[v.len() - 1];
    if last < 1.0 {
        return Err(Error::IncreaseRfMax { t, value: last });
    }
    Ok(())
}

/// Starts of runs of equal values, up to the first bucket at probability 1, plus the last bucket.
fn rebuild_unique(v: &[f64], uniq: &mut Vec<usize>) {
    let nb = v.len();
    uniq.clear();
    let mut collecting = true;
    for b in 1..=nb {
        if b == 1 || b == nb || (collecting && v[b - 1] != v[b]) {
            uniq.push(b);
        }
        if collecting && v[b - 1] >= 1.0 {
            collecting = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_runs_stop_after_first_certain_ruin() {
        let v = [0.1, 0.1, 0.2, 1.0, 1.0, 1.0];
        let mut u = Vec::new();
        rebuild_unique(&v, &mut u);
        assert_eq!(u, vec![1, 2, 3, 6]);
    }

    #[test]
    fn pruned_fill_matches_full_evaluation() {
        let params = crate::scenarios::HISTORICAL;
        let prec = 400.0;
        let nb = 1100;
        let mut vp = vec![0.0; nb];
        let mut uniq = vec![1, nb];
        for (t, alpha) in [(2, 0.7), (1, 0.4)] {
            let step = Step::new(&params, alpha, DensityKind::Standard, t, prec).unwrap();
            let mut v = vec![0.0; nb];
            step.fill(&vp, &uniq, &mut v);
            let first = v.iter().position(|&x| x >= 1.0).unwrap();
            for b in 1..=nb {
                let full = step.bucket(b, &vp, &uniq);
                if b <= first {
                    assert_eq!(full, v[b - 1]);
                } else {
                    assert!(full >= 1.0 - 1e-15 && v[b - 1] == 1.0);
                }
            }
            check_step(t, &v).unwrap();
            rebuild_unique(&v, &mut uniq);
            vp = v;
        }
    }
}
