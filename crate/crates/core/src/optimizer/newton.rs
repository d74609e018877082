use nalgebra::DVector;

use super::HessianMatrix;
use crate::error::{Error, Result};
use crate::portfolio::ReturnParams;

/// Largest accepted ratio of extreme absolute eigenvalues.
pub const MAX_CONDITION: f64 = 1e12;

/// Refuses glidepaths with a ratio pinned at a bound whose gradient element points outward.
pub fn check_interior(params: &ReturnParams, glidepath: &[f64], gradient: &[f64]) -> Result<()> {
    let lo = params.lower_bound();
    for (t, (&a, &g)) in glidepath.iter().zip(gradient).enumerate() {
        if a >= 1.0 && g > 0.0 {
            return Err(Error::Boundary { t, bound: 1.0, gradient: g });
        }
        if a <= lo && g < 0.0 {
            return Err(Error::Boundary { t, bound: lo, gradient: g });
        }
    }
    Ok(())
}

/// Solves `H Δ = -g` with a column-pivoted QR and returns `clamp(α + Δ)`.
pub fn newton_step(
    params: &ReturnParams,
    glidepath: &[f64],
    gradient: &[f64],
    hessian: &HessianMatrix,
) -> Result<Vec<f64>> {
    let mut out = glidepath.to_vec();
    if gradient.iter().all(|&g| g == 0.0) {
        params.clamp_all(&mut out);
        return Ok(out);
    }
    let ev = hessian.eigenvalues();
    let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), e| (lo.min(e.abs()), hi.max(e.abs())));
    let condition = hi / lo;
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = -DVector::from_column_slice(gradient);
    let delta =
        hessian.entries.clone().col_piv_qr().solve(&rhs).ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    for (a, d) in out.iter_mut().zip(delta.iter()) {
        *a = params.clamp(*a + d);
    }
    Ok(out)
}
