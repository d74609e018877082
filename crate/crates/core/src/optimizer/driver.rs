use super::{check_interior, newton_step, GradientVector, HessianMatrix, Method, Optimizer};
use crate::error::{Error, Result};
use crate::objective::Objective;

/// Stage of the optimization a progress record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Initial,
    InitialClimb,
    Newton,
    Ascent,
    Final,
}

/// Progress after one stage of the optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub phase: Phase,
    pub probability: f64,
    pub max_effective: Option<f64>,
    /// `(min, max)` Hessian eigenvalue when a Hessian was built.
    pub eigen_extremes: Option<(f64, f64)>,
    pub climb_steps: Option<usize>,
    /// Set when a Newton iteration lowered the probability.
    pub worsened: bool,
    pub glidepath: Vec<f64>,
}

/// Converged glidepath with the final gradient and Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub glidepath: Vec<f64>,
    pub probability: f64,
    pub gradient: GradientVector,
    pub hessian: HessianMatrix,
    pub eigen_extremes: (f64, f64),
    pub iterations: usize,
    pub diagnostics: Vec<IterationRecord>,
}

impl Optimum {
    /// True when the Hessian is negative semidefinite at the solution.
    pub fn is_local_max(&self) -> bool {
        self.eigen_extremes.1 <= 0.0
    }
}

impl<O: Objective + ?Sized> Optimizer<'_, O> {
    fn emit(&mut self, log: &mut Vec<IterationRecord>, rec: IterationRecord) {
        if let Some(f) = self.observer.as_mut() {
            f(&rec);
        }
        log.push(rec);
    }

    /// Runs the bounded initial climb, then Newton or ascent iterations until the largest effective
    /// gradient element is at most epsilon, and finally builds the Hessian at the solution.
    pub fn optimize(&mut self, initial: &[f64]) -> Result<Optimum> {
        self.objective.check_len(initial)?;
        let params = *self.objective.params();
        let eps = self.config.epsilon;
        let mut log = Vec::new();
        let mut gp = self.clamped(initial);
        let mut p = self.probability(&gp)?;
        let rec = |iteration, phase, p, gp: &[f64]| IterationRecord {
            iteration,
            phase,
            probability: p,
            max_effective: None,
            eigen_extremes: None,
            climb_steps: None,
            worsened: false,
            glidepath: gp.to_vec(),
        };
        self.emit(&mut log, rec(0, Phase::Initial, p, &gp));

        let mut grad = self.build_gradient(&gp, p)?;
        if grad.max_effective > eps {
            let cap = Some(self.config.initial_climb_cap);
            let out = self.climb(&gp, &grad, p, cap)?;
            gp = out.glidepath;
            p = out.probability;
            grad = self.build_gradient(&gp, p)?;
            let r = IterationRecord {
                max_effective: Some(grad.max_effective),
                climb_steps: Some(out.steps),
                ..rec(0, Phase::InitialClimb, p, &gp)
            };
            self.emit(&mut log, r);
        }

        let cap = self.config.iteration_cap();
        let newton = self.config.method == Method::Newton;
        let mut iteration = 0;
        loop {
            if newton {
                check_interior(&params, &gp, &grad.elements)?;
            }
            if grad.max_effective <= eps {
                break;
            }
            if iteration == cap {
                return Err(Error::NotConverged {
                    iterations: iteration,
                    max_effective: grad.max_effective,
                    glidepath: gp,
                    probability: p,
                });
            }
            iteration += 1;
            let mut r = match self.config.method {
                Method::Newton => {
                    let start_p = p;
                    let hess = self.build_hessian(&gp, p, &grad)?;
                    let extremes = hess.eigen_extremes();
                    gp = newton_step(&params, &gp, &grad.elements, &hess)?;
                    p = self.probability(&gp)?;
                    IterationRecord {
                        eigen_extremes: Some(extremes),
                        worsened: p < start_p,
                        ..rec(iteration, Phase::Newton, p, &gp)
                    }
                }
                Method::GradientAscent => {
                    let out = self.climb(&gp, &grad, p, None)?;
                    gp = out.glidepath;
                    p = out.probability;
                    IterationRecord { climb_steps: Some(out.steps), ..rec(iteration, Phase::Ascent, p, &gp) }
                }
            };
            grad = self.build_gradient(&gp, p)?;
            r.max_effective = Some(grad.max_effective);
            self.emit(&mut log, r);
        }

        let hessian = self.build_hessian(&gp, p, &grad)?;
        let eigen_extremes = hessian.eigen_extremes();
        let r = IterationRecord {
            max_effective: Some(grad.max_effective),
            eigen_extremes: Some(eigen_extremes),
            ..rec(iteration, Phase::Final, p, &gp)
        };
        self.emit(&mut log, r);
        Ok(Optimum {
            glidepath: gp,
            probability: p,
            gradient: grad,
            hessian,
            eigen_extremes,
            iterations: iteration,
            diagnostics: log,
        })
    }
}
