//! Regression with smoothly varying ridge regularization.
//!
//! Gaussian radial-basis regression where each coefficient carries its
//! own tuning parameter, and the tuning parameters are themselves
//! penalized to vary smoothly across neighboring basis positions. The
//! crate provides the plain ridge baseline, the alternating estimator
//! for the smoothly varying penalty, an information criterion for
//! selecting the two smoothness hyperparameters, and a simulation
//! harness for benchmarking both methods on known test functions.

pub mod basis;
pub mod data;
pub mod error;
pub mod gic;
pub mod infocrit;
pub mod ridge;
pub mod simlab;
pub mod svreg;
#[doc(hidden)]
pub mod testutil;
pub mod types;

pub use basis::{design_matrix, Adjacency, BasisSpec, DesignMatrix};
pub use data::{load_dataset, validate_compatibility, write_dataset};
pub use error::{Error, Result};
pub use gic::{
    approx_gic, approximation_gap, assemble_stu, default_gamma_grid, default_gamma_grid_for,
    gamma_select, lambda_tilde, GIC_SLACK,
    lambda_tilde_derivatives, LambdaTilde, StuMatrices,
};
pub use ridge::{
    default_lambda_grid, log_grid, ridge_edf, ridge_fit, ridge_gic, ridge_select, RidgeConfig,
};
pub use simlab::{
    generate, mse, run_benchmark, run_trial, true_function, Method, MethodSummary, Selected,
    SimConfig, SimReport, TrueFunction,
};
pub use svreg::{
    lambda_step_single, lambda_sweep, svr_fit, svr_objective, weighted_ridge_step, BoundaryMode,
    LambdaInit, SvrOptions,
};
pub use types::{
    Dataset, FitResult, GicMode, GicReport, LambdaChoice, LambdaState, ModelParams,
};
