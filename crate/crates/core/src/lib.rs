//! Glidepath optimization for retirement portfolios: probabilities of avoiding ruin under a fixed
//! real withdrawal, their gradients and Hessians, and Newton / gradient-ascent maximization over
//! the equity ratios.

pub mod density;
pub mod error;
pub mod estimator;
pub mod horizon;
pub mod io;
pub mod objective;
pub mod optimizer;
pub mod portfolio;
pub mod quasi;
pub mod ruin;
pub mod scenarios;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use estimator::Estimator;
pub use horizon::{MortalityDistribution, RandomHorizon};
pub use objective::{FixedHorizon, Objective};
pub use optimizer::{Method, Optimizer, OptimizerConfig};
pub use portfolio::{MomentBundle, ReturnParams};
pub use ruin::{DensitySelector, DpGrid};
