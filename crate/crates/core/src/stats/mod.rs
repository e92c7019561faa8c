//! Estimators with interval estimates for the scaling, drift, coalescence
//! and collision quantities of the model.

pub mod collision;
pub mod drift;
pub mod fit;
pub mod scaling;
pub mod summary;

pub use collision::{coalescence_survival, nu_regression, regeneration_tails, NuRegression, SurvivalCurve};
pub use drift::{alpha_estimate, lyapunov_drift, martingale_drift, AlphaEstimate, DriftBin, LyapunovDrift, MartingaleConfig};
pub use fit::TailFit;
pub use scaling::{estimate_scaling, eta_estimate, grid_start, rescaled_endpoint_sample, EtaEstimate, ScalingParams};
pub use summary::{Estimate, Proportion};
