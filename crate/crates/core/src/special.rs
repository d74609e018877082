//! Normal CDF and the regularized lower incomplete gamma function at the shapes the densities need.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Gamma shapes appearing in the CDF linear combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    One,
    ThreeHalves,
    Two,
    FiveHalves,
}

impl Shape {
    pub fn value(self) -> f64 {
        match self {
            Shape::One => 1.0,
            Shape::ThreeHalves => 1.5,
            Shape::Two => 2.0,
            Shape::FiveHalves => 2.5,
        }
    }
}

/// Standard normal CDF.
#[inline]
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Regularized lower incomplete gamma `P(shape, u)` for `u >= 0`.
///
/// Small arguments use the power series; larger ones use the closed-form complement.
pub fn gamma_p(shape: Shape, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u < 1.0 {
        series(shape.value(), u)
    } else {
        1.0 - gamma_q_closed(shape, u)
    }
}

/// `Q(shape, u) = 1 - P(shape, u)` in closed form.
fn gamma_q_closed(shape: Shape, u: f64) -> f64 {
    let e = (-u).exp();
    match shape {
        Shape::One => e,
        Shape::Two => e * (1.0 + u),
        Shape::ThreeHalves => {
            let s = u.sqrt();
            libm::erfc(s) + 2.0 * s * e / PI.sqrt()
        }
        Shape::FiveHalves => {
            let s = u.sqrt();
            libm::erfc(s) + 2.0 * s * e / PI.sqrt() * (1.0 + 2.0 * u / 3.0)
        }
    }
}

fn series(a: f64, u: f64) -> f64 {
    // P(a,u) = u^a e^{-u} / Γ(a+1) · Σ u^n / ((a+1)...(a+n))
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = a;
    for _ in 0..200 {
        k += 1.0;
        term *= u / k;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    let log_pref = a * u.ln() - u - ln_gamma_plus_one(a);
    sum * log_pref.exp()
}

fn ln_gamma_plus_one(a: f64) -> f64 {
    // Γ(a+1) for the four shapes.
    let g = if a == 1.0 {
        1.0
    } else if a == 2.0 {
        2.0
    } else if a == 1.5 {
        0.75 * PI.sqrt()
    } else if a == 2.5 {
        1.875 * PI.sqrt()
    } else {
        libm::tgamma(a + 1.0)
    };
    g.ln()
}
