//! Large-sample two-proportion tests for comparing Monte Carlo success probabilities.

use crate::special::norm_cdf;

/// Observed success fraction and its sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionSample {
    pub p_hat: f64,
    pub n: u64,
}

impl ProportionSample {
    pub fn new(p_hat: f64, n: u64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p_hat) && n >= 1);
        Self { p_hat, n }
    }
}

/// Result of a two-proportion test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub t_stat: f64,
    pub p_value: f64,
    pub reject: bool,
}

/// Two-sided test of equal proportions with the pooled variance estimate.
///
/// Returns `(t_stat, p_value)`. A pooled proportion of 0 or 1 gives p-value 1 when the
/// proportions agree and 0 otherwise.
pub fn equality_test(a: ProportionSample, b: ProportionSample) -> (f64, f64) {
    let (na, nb) = (a.n as f64, b.n as f64);
    let pooled = (na * a.p_hat + nb * b.p_hat) / (na + nb);
    let var = pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb);
    if var <= 0.0 {
        return if a.p_hat == b.p_hat { (0.0, 1.0) } else { (f64::INFINITY.copysign(a.p_hat - b.p_hat), 0.0) };
    }
    let t = (a.p_hat - b.p_hat) / var.sqrt();
    let c = norm_cdf(t);
    (t, 2.0 * c.min(1.0 - c))
}

/// One-sided non-inferiority test of `new` against `base` with unpooled variances.
///
/// The p-value is `Φ(t)`; rejection (`p_value <= alpha`) means `new` is inferior.
pub fn noninferiority_test(new: ProportionSample, base: ProportionSample, alpha: f64) -> TestOutcome {
    let var = base.p_hat * (1.0 - base.p_hat) / base.n as f64 + new.p_hat * (1.0 - new.p_hat) / new.n as f64;
    let diff = new.p_hat - base.p_hat;
    if var <= 0.0 {
        let reject = new.p_hat < base.p_hat;
        let t_stat = if diff == 0.0 { 0.0 } else { f64::INFINITY.copysign(diff) };
        return TestOutcome { t_stat, p_value: if reject { 0.0 } else { 1.0 }, reject };
    }
    let t_stat = diff / var.sqrt();
    let p_value = norm_cdf(t_stat);
    TestOutcome { t_stat, p_value, reject: p_value <= alpha }
}
