//! Worst-case robust elliptic localization.
//!
//! Given transmitter and receiver positions and bistatic ranges with a known
//! error bound, [`estimators::estimate_minmax`] approximates the Chebyshev
//! center of the set of target positions consistent with the data, using a
//! semidefinite relaxation solved by the built-in [`sdp_solver`]. Gauss-Newton and IRLS baselines and a Monte Carlo
//! [`harness`] for Gaussian-mixture noise studies are included.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod estimators;
pub mod geometry;
pub mod harness;
pub mod noise;
pub mod sdp_model;
pub mod sdp_solver;

pub use estimators::{Estimate, EstimateError, MinMaxOptions};
pub use geometry::{MeasurementSet, Point2, Scenario};
pub use noise::GaussianMixtureModel;
pub use sdp_model::ConicProgram;
pub use sdp_solver::{SolverOptions, SolverSolution, SolverStatus};
