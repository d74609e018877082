use super::Optimizer;
use crate::error::Result;
use crate::objective::Objective;
use crate::ruin::DensitySelector;
use crate::stats::{equality_test, ProportionSample};

/// Gradient of the success probability with respect to the equity ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    /// Elements used for stepping; in simulation mode statistically-zero elements are set to 0.
    pub elements: Vec<f64>,
    /// Elements before the zero test.
    pub unadjusted: Vec<f64>,
    /// Multipliers `K_t` turning probability differences into gradient elements.
    pub constants: Vec<f64>,
    /// Largest movement the elements can realize inside the feasible box.
    pub max_effective: f64,
}

impl GradientVector {
    pub fn is_zero(&self) -> bool {
        self.elements.iter().all(|&g| g == 0.0)
    }
}

/// Movement realizable by stepping `alpha` by `g` inside `[lower, 1]`.
pub fn effective_magnitude(alpha: f64, g: f64, lower: f64) -> f64 {
    if alpha + g > 1.0 {
        1.0 - alpha
    } else if alpha + g < lower {
        alpha - lower
    } else {
        g.abs()
    }
}

fn max_effective(glidepath: &[f64], elements: &[f64], lower: f64) -> f64 {
    glidepath.iter().zip(elements).map(|(&a, &g)| effective_magnitude(a, g, lower)).fold(0.0, f64::max)
}

impl<O: Objective + ?Sized> Optimizer<'_, O> {
    /// Builds `g_t = K_t (P_g,t - p_nr)`, where `P_g,t` substitutes the gradient density at `t`.
    pub fn build_gradient(&mut self, glidepath: &[f64], p_nr: f64) -> Result<GradientVector> {
        let gp = self.clamped(glidepath);
        let params = *self.objective.params();
        let constants = gp.iter().map(|&a| params.gradient_constant(a)).collect::<Result<Vec<_>>>()?;
        let active: Vec<usize> = (0..gp.len()).filter(|&t| self.objective.active(t)).collect();
        let selectors: Vec<_> = active.iter().map(|&t| DensitySelector::gradient(t)).collect();
        let n = self.config.n_special();
        let probs = self.evaluate(&gp, &selectors, n)?;
        let mut unadjusted = vec![0.0; gp.len()];
        for (&t, p) in active.iter().zip(probs) {
            unadjusted[t] = constants[t] * (p - p_nr);
        }
        let mut elements = unadjusted.clone();
        if self.config.estimator.is_simulation() && self.config.alpha_zero < 1.0 {
            let base = ProportionSample::new(p_nr, self.config.n_probability());
            for (g, k) in elements.iter_mut().zip(&constants) {
                let special = ProportionSample::new((p_nr + *g / k).clamp(0.0, 1.0), n);
                if equality_test(special, base).1 > self.config.alpha_zero {
                    *g = 0.0;
                }
            }
        }
        let max_effective = max_effective(&gp, &elements, params.lower_bound());
        Ok(GradientVector { elements, unadjusted, constants, max_effective })
    }
}
