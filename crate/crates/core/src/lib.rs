//! Numerical laboratory for a trader who maximizes a central bank's
//! barrier-defense inventory net of quadratic slippage.
//!
//! The crate provides four mutually cross-validating routes to the same
//! objects:
//!
//! * [`closed_form`] - the exact value function `U`, its derivatives and the
//!   optimal feedback speed `v*`;
//! * [`sim`] - a Skorokhod-reflection Euler simulator with local-time
//!   estimators and the Monte Carlo objective;
//! * [`regularized`] - the kernel-smoothed problem, its Feynman-Kac sampling
//!   representations and the `eps -> 0` convergence diagnostics;
//! * [`pde`] - implicit finite-difference solvers for the smoothed and
//!   singular equations and the exponential substitution linearizing them.
//!
//! Everything numerical is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases below pin the double-precision variants the
//! command-line tool and the acceptance suite use.

// validation deliberately writes `!(x > 0)` so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod closed_form;
pub mod erf;
pub mod error;
pub mod model;
pub mod pde;
pub mod real;
pub mod regularized;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod surface;

pub use closed_form::ClosedForm;
pub use error::{Error, Result};
pub use model::{eval_strategy, ModelParams, Strategy};
pub use pde::{
    residual, solve_hjb_eps, solve_hopf_cole, solve_singular, HopfColeSolution, PdeKind,
};
pub use real::Real;
pub use regularized::{convergence_study, ConvergenceTable, RegularizedValue};
pub use sim::{
    brownian_local_time_mc, coupled_refinement_gap, exp_local_time_mc, mc_objective, simulate_path,
    simulate_path_trace, simulate_paths, value_from_exp_moment, InventoryConvention,
    LocalTimeEstimator, PathRecord, SimConfig,
};
pub use stats::McEstimate;
pub use surface::{Grid1D, Surface};

/// Double-precision model parameters.
pub type ModelParams64 = model::ModelParams<f64>;
/// Double-precision strategy.
pub type Strategy64 = model::Strategy<f64>;
/// Double-precision closed-form evaluator.
pub type ClosedForm64 = closed_form::ClosedForm<f64>;
/// Double-precision smoothed-problem evaluator.
pub type RegularizedValue64 = regularized::RegularizedValue<f64>;
/// Double-precision grid.
pub type Grid64 = surface::Grid1D<f64>;
/// Double-precision surface.
pub type Surface64 = surface::Surface<f64>;
/// Double-precision Monte Carlo estimate.
pub type McEstimate64 = stats::McEstimate<f64>;
/// Double-precision path record.
pub type PathRecord64 = sim::PathRecord<f64>;
