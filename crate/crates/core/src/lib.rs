//! Generalised Pareto regression for tail losses.
//!
//! The scale of each exceedance over a threshold `mu` follows
//! `log sigma_i = x_i' beta`, with a common shape `xi`. Coefficients are
//! estimated by MAP under one of several shrinkage priors, tuned by k-fold
//! cross-validation where the prior has a free hyperparameter.

mod clock;
pub mod compare;
pub mod cv;
pub mod error;
pub mod fit;
pub mod gpd;
pub mod kv;
pub mod model;
mod optim;
pub mod pipeline;
pub mod priors;
pub mod report;
pub mod simulation;
pub mod volatility;
#[cfg(test)]
mod testkit;

pub use error::{GprError, Result};
pub use fit::{fit_map, FitOptions, FitResult};
pub use gpd::GpdParams;
pub use model::{ExceedanceDataset, GprParams};
pub use priors::{PriorFamily, PriorSpec};
