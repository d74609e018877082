use nalgebra::{DMatrix, SymmetricEigen};

use super::{GradientVector, Optimizer};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::ruin::DensitySelector;

/// Symmetric Hessian of the success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianMatrix {
    pub entries: DMatrix<f64>,
}

impl HessianMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `(min, max)` eigenvalue.
    pub fn eigen_extremes(&self) -> (f64, f64) {
        let ev = self.eigenvalues();
        (ev[0], ev[ev.len() - 1])
    }
}

enum Entry {
    Off(usize, usize),
    H1(usize),
    H2(usize),
}

impl<O: Objective + ?Sized> Optimizer<'_, O> {
    /// Off-diagonals `K_i K_j (P_gg,ij - g_i/K_i - g_j/K_j - p_nr)`; diagonals `Q1 P_h1 + Q2 P_h2 + Q3 p_nr`.
    pub fn build_hessian(&mut self, glidepath: &[f64], p_nr: f64, gradient: &GradientVector) -> Result<HessianMatrix> {
        let gp = self.clamped(glidepath);
        let params = *self.objective.params();
        let dim = gp.len();
        let active: Vec<usize> = (0..dim).filter(|&t| self.objective.active(t)).collect();
        for &t in &active {
            let mo = params.moments(gp[t]);
            if mo.theta_singular() {
                return Err(Error::SingularTheta { alpha: gp[t], t });
            }
        }
        let mut entries = Vec::new();
        let mut selectors = Vec::new();
        for (a, &i) in active.iter().enumerate() {
            for &j in &active[..a] {
                entries.push(Entry::Off(j, i));
                selectors.push(DensitySelector::gradient_pair(j, i));
            }
            entries.push(Entry::H1(i));
            selectors.push(DensitySelector::h1(i));
            entries.push(Entry::H2(i));
            selectors.push(DensitySelector::h2(i));
        }
        let n = self.config.n_special();
        let probs = self.evaluate(&gp, &selectors, n)?;

        let g = &gradient.elements;
        let k = &gradient.constants;
        let mut h = DMatrix::zeros(dim, dim);
        let mut h1 = vec![0.0; dim];
        let mut h2 = vec![0.0; dim];
        for (e, p) in entries.iter().zip(probs) {
            match *e {
                Entry::Off(i, j) => {
                    h[(i, j)] = k[i] * k[j] * (p - g[i] / k[i] - g[j] / k[j] - p_nr);
                    h[(j, i)] = h[(i, j)];
                }
                Entry::H1(t) => h1[t] = p,
                Entry::H2(t) => h2[t] = p,
            }
        }
        for &t in &active {
            let (q1, q2, q3) = params.moments(gp[t]).hessian_weights();
            h[(t, t)] = q1 * h1[t] + q2 * h2[t] + q3 * p_nr;
        }
        Ok(HessianMatrix { entries: h })
    }
}
