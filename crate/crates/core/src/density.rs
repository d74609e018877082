//! Densities of the adjusted return (f, g, h1, h2) and their CDFs as linear combinations of
//! normal and gamma CDFs.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::portfolio::MomentBundle;
use crate::special::{gamma_p, norm_cdf, Shape};

/// Which density represents the adjusted return at a time point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityKind {
    /// The normal density f.
    Standard,
    /// The gradient density g.
    Gradient,
    /// The first diagonal-Hessian density h1.
    HessianH1,
    /// The second diagonal-Hessian density h2.
    HessianH2,
}

/// One gamma-CDF term of a CDF linear combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTerm {
    pub weight: f64,
    pub shape: Shape,
    /// Whether the term flips sign above the mean.
    pub alternates: bool,
}

/// Constants of `cdf(r) = leading · (Σ w_i (1 - s_i P_i(u)) + normal_weight · Φ(z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfCoefficients {
    pub leading: f64,
    pub terms: Vec<GammaTerm>,
    pub normal_weight: f64,
}

/// Builds the CDF constants for `kind`.
pub fn coefficients(kind: DensityKind, mo: &MomentBundle) -> Result<CdfCoefficients> {
    check(kind, mo)?;
    let (v, vp, mp) = (mo.v, mo.v_prime, mo.m_prime);
    let term = |weight, shape, alternates| GammaTerm { weight, shape, alternates };
    Ok(match kind {
        DensityKind::Standard => CdfCoefficients { leading: 1.0, terms: vec![], normal_weight: 1.0 },
        DensityKind::Gradient => CdfCoefficients {
            leading: 1.0 / (mp * mp * v * v + v * vp * vp),
            terms: vec![
                term(vp * vp * v / 2.0, Shape::ThreeHalves, true),
                term(-vp * mp * v * (2.0 * v / PI).sqrt(), Shape::One, false),
            ],
            normal_weight: mp * mp * v * v,
        },
        DensityKind::HessianH1 => {
            let k = mo.kh1;
            CdfCoefficients {
                leading: 1.0 / (v + k * k),
                terms: vec![
                    term(v / 2.0, Shape::ThreeHalves, true),
                    term(-(2.0 * v / PI).sqrt() * k, Shape::One, false),
                ],
                normal_weight: k * k,
            }
        }
        DensityKind::HessianH2 => CdfCoefficients {
            leading: 2.0 / (vp * vp + 2.0 * v * mp * mp),
            terms: vec![
                term(3.0 * vp * vp / 8.0, Shape::FiveHalves, true),
                term(-(2.0 * v / PI).sqrt() * vp * mp, Shape::Two, false),
                term((2.0 * mp * mp * v - vp * vp) / 4.0, Shape::ThreeHalves, true),
                term((v / (2.0 * PI)).sqrt() * vp * mp, Shape::One, false),
            ],
            normal_weight: vp * vp / 4.0,
        },
    })
}

fn check(kind: DensityKind, mo: &MomentBundle) -> Result<()> {
    match kind {
        DensityKind::Standard => Ok(()),
        DensityKind::HessianH1 if mo.theta_singular() => Err(Error::SingularTheta { alpha: mo.alpha, t: 0 }),
        _ if mo.v_prime <= 0.0 => Err(Error::NonPositiveSlope { alpha: mo.alpha, mva: mo.mva }),
        _ => Ok(()),
    }
}

/// Density value at `r`.
pub fn pdf(kind: DensityKind, mo: &MomentBundle, r: f64) -> Result<f64> {
    check(kind, mo)?;
    Ok(pdf_unchecked(kind, mo, r))
}

pub(crate) fn pdf_unchecked(kind: DensityKind, mo: &MomentBundle, r: f64) -> f64 {
    let d = r - mo.m;
    let f = (-d * d / (2.0 * mo.v)).exp() / (2.0 * PI * mo.v).sqrt();
    let (v, vp, mp) = (mo.v, mo.v_prime, mo.m_prime);
    match kind {
        DensityKind::Standard => f,
        DensityKind::Gradient => {
            let a = vp * d + mp * v;
            a * a / (mp * mp * v * v + v * vp * vp) * f
        }
        DensityKind::HessianH1 => {
            let a = d + mo.kh1;
            a * a / (v + mo.kh1 * mo.kh1) * f
        }
        DensityKind::HessianH2 => {
            let a = vp / (2.0 * v) * d * d + mp * d - vp / 2.0;
            2.0 * a * a / (vp * vp + 2.0 * v * mp * mp) * f
        }
    }
}

/// CDF value at `r`, clamped to `[0, 1]`.
pub fn cdf(kind: DensityKind, mo: &MomentBundle, r: f64) -> Result<f64> {
    Ok(CdfEval::new(kind, mo)?.eval(r))
}

/// CDF of one density at fixed moments, prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CdfEval {
    m: f64,
    sd: f64,
    coef: CdfCoefficients,
}

impl CdfEval {
    pub fn new(kind: DensityKind, mo: &MomentBundle) -> Result<Self> {
        Ok(Self { m: mo.m, sd: mo.sd(), coef: coefficients(kind, mo)? })
    }

    pub fn coefficients(&self) -> &CdfCoefficients {
        &self.coef
    }

    pub fn eval(&self, x: f64) -> f64 {
        let z = (x - self.m) / self.sd;
        let phi = norm_cdf(z);
        if self.coef.terms.is_empty() {
            return self.coef.leading * self.coef.normal_weight * phi;
        }
        let u = 0.5 * z * z;
        let above = x > self.m;
        let sgn = if above { -1.0 } else { 1.0 };
        let mut sum = 0.0;
        let mut saturated = above;
        for t in &self.coef.terms {
            let p = gamma_p(t.shape, u);
            saturated &= p == 1.0;
            let s = if t.alternates { sgn } else { 1.0 };
            sum += t.weight * (1.0 - s * p);
        }
        if saturated && phi == 1.0 {
            return 1.0;
        }
        (self.coef.leading * (sum + self.coef.normal_weight * phi)).clamp(0.0, 1.0)
    }

    /// True when every term has reached its upper limit, so `eval(x)` is exactly 1.
    fn saturated(&self, x: f64) -> bool {
        if x <= self.m || norm_cdf((x - self.m) / self.sd) != 1.0 {
            return false;
        }
        let u = 0.5 * ((x - self.m) / self.sd).powi(2);
        self.coef.terms.iter().all(|t| gamma_p(t.shape, u) == 1.0)
    }

    /// Point at and above which the CDF is exactly 1 (all terms saturated).
    pub(crate) fn saturation_point(&self) -> f64 {
        let mut hi = self.m + 60.0 * self.sd;
        if !self.saturated(hi) {
            return f64::INFINITY;
        }
        let mut lo = self.m;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return hi;
            }
            if self.saturated(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
}

/// `∫_{-∞}^{y} (x-μ)^n exp(-(x-μ)²/(2σ²)) dx` for `n` in 1..=4.
pub fn truncated_power_integral(n: u32, y: f64, mu: f64, sigma2: f64) -> Result<f64> {
    let (shape, gamma) = power_shape(n)?;
    let sigma = sigma2.sqrt();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let alt = if y > mu && n.is_multiple_of(2) { -1.0 } else { 1.0 };
    let d = y - mu;
    let u = if d.is_infinite() { f64::INFINITY } else { d * d / (2.0 * sigma2) };
    let p = if u.is_infinite() { 1.0 } else { gamma_p(shape, u) };
    Ok(sign * sigma.powi(n as i32 + 1) * 2f64.sqrt().powi(n as i32 - 1) * gamma * (1.0 - alt * p))
}

/// Full-line integral `∫ (x-μ)^n exp(-(x-μ)²/(2σ²)) dx`.
pub fn gaussian_central_moment(n: u32, sigma2: f64) -> Result<f64> {
    power_shape(n)?;
    let sigma = sigma2.sqrt();
    let root = (2.0 * PI).sqrt();
    Ok(match n {
        2 => sigma.powi(3) * root,
        4 => 3.0 * sigma.powi(5) * root,
        _ => 0.0,
    })
}

fn power_shape(n: u32) -> Result<(Shape, f64)> {
    let sp = PI.sqrt();
    match n {
        1 => Ok((Shape::One, 1.0)),
        2 => Ok((Shape::ThreeHalves, sp / 2.0)),
        3 => Ok((Shape::Two, 1.0)),
        4 => Ok((Shape::FiveHalves, 3.0 * sp / 4.0)),
        _ => Err(Error::MomentOrder(n)),
    }
}
