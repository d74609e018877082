//! Moments of the inflation/expense-adjusted portfolio return as functions of the equity ratio.

use crate::error::{Error, Result};

/// Offset above the minimum-variance ratio that bounds the feasible box from below.
pub const MVA_OFFSET: f64 = 1e-4;

/// Real stock/bond return moments and the expense ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnParams {
    pub mu_s: f64,
    pub sigma2_s: f64,
    pub mu_b: f64,
    pub sigma2_b: f64,
    pub cov_sb: f64,
    pub expense_ratio: f64,
}

impl ReturnParams {
    /// Validated constructor.
    pub fn new(mu_s: f64, sigma2_s: f64, mu_b: f64, sigma2_b: f64, cov_sb: f64, expense_ratio: f64) -> Result<Self> {
        let p = Self { mu_s, sigma2_s, mu_b, sigma2_b, cov_sb, expense_ratio };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.mu_s, self.sigma2_s, self.mu_b, self.sigma2_b, self.cov_sb, self.expense_ratio];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if self.sigma2_s <= 0.0 || self.sigma2_b <= 0.0 {
            return Err(Error::InvalidParams("variances must be positive".into()));
        }
        if self.cov_sb * self.cov_sb > self.sigma2_s * self.sigma2_b {
            return Err(Error::InvalidParams("covariance exceeds the product of standard deviations".into()));
        }
        if !(0.0..1.0).contains(&self.expense_ratio) {
            return Err(Error::InvalidParams("expense ratio must lie in [0, 1)".into()));
        }
        if self.mu_s <= self.mu_b {
            return Err(Error::InvalidParams("stock mean must exceed bond mean".into()));
        }
        if self.sigma2_s + self.sigma2_b - 2.0 * self.cov_sb <= 0.0 {
            return Err(Error::PerfectlyCorrelated);
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        1.0 - self.expense_ratio
    }

    /// Mean of the adjusted return, `m(α)`.
    pub fn mean(&self, alpha: f64) -> f64 {
        self.scale() * (1.0 + alpha * self.mu_s + (1.0 - alpha) * self.mu_b)
    }

    /// Variance of the adjusted return, `v(α)`.
    pub fn variance(&self, alpha: f64) -> f64 {
        let s = self.scale();
        s * s
            * (alpha * alpha * self.sigma2_s
                + (1.0 - alpha) * (1.0 - alpha) * self.sigma2_b
                + 2.0 * alpha * (1.0 - alpha) * self.cov_sb)
    }

    /// `dm/dα`, constant in α.
    pub fn mean_prime(&self) -> f64 {
        self.scale() * (self.mu_s - self.mu_b)
    }

    /// `dv/dα`.
    pub fn variance_prime(&self, alpha: f64) -> f64 {
        let s = self.scale();
        s * s * (2.0 * alpha * self.sigma2_s - 2.0 * (1.0 - alpha) * self.sigma2_b + (2.0 - 4.0 * alpha) * self.cov_sb)
    }

    /// `d²v/dα²`, constant in α.
    pub fn variance_second(&self) -> f64 {
        let s = self.scale();
        s * s * (2.0 * self.sigma2_s + 2.0 * self.sigma2_b - 4.0 * self.cov_sb)
    }

    /// Equity ratio minimizing the portfolio variance.
    pub fn min_variance_alpha(&self) -> Result<f64> {
        let den = self.sigma2_s + self.sigma2_b - 2.0 * self.cov_sb;
        if den <= 0.0 {
            return Err(Error::PerfectlyCorrelated);
        }
        Ok((self.sigma2_b - self.cov_sb) / den)
    }

    /// Lower edge of the feasible box, `MVA + 1e-4`.
    pub fn lower_bound(&self) -> f64 {
        self.min_variance_alpha().unwrap_or(0.0) + MVA_OFFSET
    }

    /// Clamps a ratio into `[MVA + 1e-4, 1]`.
    pub fn clamp(&self, alpha: f64) -> f64 {
        let lo = self.lower_bound();
        if alpha > 1.0 {
            1.0
        } else if alpha < lo {
            lo
        } else {
            alpha
        }
    }

    pub fn clamp_all(&self, ratios: &mut [f64]) {
        for a in ratios.iter_mut() {
            *a = self.clamp(*a);
        }
    }

    /// `(m', v', v'')` at `alpha`.
    pub fn moment_derivatives(&self, alpha: f64) -> (f64, f64, f64) {
        (self.mean_prime(), self.variance_prime(alpha), self.variance_second())
    }

    /// `K = v'/(2v) + m'^2/(2v')`, the multiplier turning a probability difference into a gradient element.
    pub fn gradient_constant(&self, alpha: f64) -> Result<f64> {
        let vp = self.variance_prime(alpha);
        if vp <= 0.0 {
            return Err(Error::NonPositiveSlope { alpha, mva: self.min_variance_alpha()? });
        }
        let mp = self.mean_prime();
        Ok(vp / (2.0 * self.variance(alpha)) + mp * mp / (2.0 * vp))
    }

    pub fn moments(&self, alpha: f64) -> MomentBundle {
        MomentBundle::new(self, alpha)
    }
}

/// Moments and derived constants at one equity ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBundle {
    pub alpha: f64,
    pub m: f64,
    pub m_prime: f64,
    pub v: f64,
    pub v_prime: f64,
    pub v_double_prime: f64,
    pub mva: f64,
    /// Shift inside the squared term of h1: `-2 v v' m' / θ`.
    pub kh1: f64,
    /// `θ = v v'' - 2 v'^2`.
    pub theta: f64,
}

impl MomentBundle {
    pub fn new(params: &ReturnParams, alpha: f64) -> Self {
        let m = params.mean(alpha);
        let v = params.variance(alpha);
        let (m_prime, v_prime, v_double_prime) = params.moment_derivatives(alpha);
        let theta = v * v_double_prime - 2.0 * v_prime * v_prime;
        let kh1 = -2.0 * v_prime * m_prime * v / theta;
        let mva = params.min_variance_alpha().unwrap_or(f64::NAN);
        Self { alpha, m, m_prime, v, v_prime, v_double_prime, mva, kh1, theta }
    }

    pub fn sd(&self) -> f64 {
        self.v.sqrt()
    }

    /// True when θ is too small for h1 to be defined.
    pub fn theta_singular(&self) -> bool {
        self.theta.abs() < 1e-12 * self.v * self.v_double_prime
    }

    /// Gradient multiplier `K`.
    pub fn k(&self) -> f64 {
        self.v_prime / (2.0 * self.v) + self.m_prime * self.m_prime / (2.0 * self.v_prime)
    }

    /// Weights `(Q1, Q2, Q3)` with `∂²f/∂α² = Q1 h1 + Q2 h2 + Q3 f`.
    pub fn hessian_weights(&self) -> (f64, f64, f64) {
        let (v, vp, vpp, mp) = (self.v, self.v_prime, self.v_double_prime, self.m_prime);
        let q1 = (v + self.kh1 * self.kh1) * self.theta / (2.0 * v * v * v);
        let q2 = (vp * vp + 2.0 * v * mp * mp) / (2.0 * v * v);
        let q3 = -((vpp * v - vp * vp + 2.0 * v * mp * mp) / (2.0 * v * v)
            + 2.0 * vp * vp * mp * mp / (v * v * vpp - 2.0 * vp * vp * v));
        (q1, q2, q3)
    }
}
