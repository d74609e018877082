use super::{GradientVector, Optimizer};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::ruin::DensitySelector;
use crate::stats::{noninferiority_test, ProportionSample};

/// Result of climbing along a fixed gradient direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimbOutcome {
    pub glidepath: Vec<f64>,
    pub probability: f64,
    /// Number of accepted steps.
    pub steps: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Continue,
    Stop,
    Capped,
}

/// Step size at ladder index `i`, `(5^{1/4})^i`.
fn ladder(i: i32) -> f64 {
    (5f64.ln() / 4.0).exp().powi(i)
}

/// Initial ladder index and step size from the largest effective gradient element.
fn initial_step(max_grad: f64) -> (i32, f64) {
    if max_grad >= 0.1 {
        return (1, 1.0);
    }
    for i in 1..=10 {
        if max_grad >= 1.0 / (10.0 * 10f64.powi(i)) && max_grad < 1.0 / (10.0 * 10f64.powi(i - 1)) {
            return (i, ladder(i));
        }
    }
    (10, ladder(10))
}

impl<O: Objective + ?Sized> Optimizer<'_, O> {
    /// Repeatedly steps `α ← clamp(α + s·g)` while the probability improves (dynamic program) or
    /// stays non-inferior (simulation). The step size `s` comes from the decade of the largest
    /// effective gradient element and is adapted when the first step fails.
    ///
    /// `cap` bounds the number of attempted steps; a capped climb keeps its last step.
    pub fn climb(
        &mut self,
        glidepath: &[f64],
        gradient: &GradientVector,
        best_p: f64,
        cap: Option<usize>,
    ) -> Result<ClimbOutcome> {
        let mut cur = self.clamped(glidepath);
        if gradient.is_zero() {
            return Ok(ClimbOutcome { glidepath: cur, probability: best_p, steps: 0 });
        }
        let params = *self.objective.params();
        let sim = self.config.estimator.is_simulation();
        let n = self.config.n_climb();
        let (mut index, mut step) = initial_step(gradient.max_effective);
        let (mut tryup, mut orig_index) = (0, 0);
        let mut prev = cur.clone();
        let mut max_p = best_p;
        let mut max_n = self.config.n_probability();
        let mut state = State::Continue;
        let mut improved = false;
        let mut attempts = 0usize;
        let mut accepted = 0usize;

        while state == State::Continue || !improved {
            if state == State::Stop && !improved {
                if orig_index == 0 {
                    orig_index = index;
                }
                cur.clone_from(&prev);
                if index == 0 {
                    return Err(Error::Stuck { glidepath: cur, probability: max_p });
                } else if index == 1 && tryup == 5 {
                    index = 0;
                    step /= 2.0;
                } else if tryup == 5 {
                    index = if index == orig_index + 5 { orig_index - 1 } else { index - 1 };
                    step = ladder(index);
                } else {
                    index += 1;
                    step = ladder(index);
                    tryup += 1;
                }
                state = State::Continue;
            }

            prev.clone_from(&cur);
            for (a, g) in cur.iter_mut().zip(&gradient.elements) {
                *a = params.clamp(*a + step * g);
            }
            let new_p = self.evaluate(&cur, &[DensitySelector::STANDARD], n)?[0];
            if sim {
                let test = noninferiority_test(
                    ProportionSample::new(new_p, n),
                    ProportionSample::new(max_p, max_n),
                    self.config.alpha_noninferiority,
                );
                if test.reject {
                    state = State::Stop;
                } else {
                    improved = true;
                    accepted += 1;
                }
                if new_p > max_p {
                    max_p = new_p;
                    max_n = n;
                }
            } else if new_p > max_p {
                improved = true;
                accepted += 1;
                max_p = new_p;
            } else {
                state = State::Stop;
            }

            attempts += 1;
            if cap.is_some_and(|c| c > 0 && attempts == c) && state == State::Continue {
                state = State::Capped;
            }
        }

        if state != State::Capped {
            cur = prev;
        }
        if sim {
            max_p = self.evaluate(&cur, &[DensitySelector::STANDARD], 2 * n)?[0];
        }
        Ok(ClimbOutcome { glidepath: cur, probability: max_p, steps: accepted })
    }
}
