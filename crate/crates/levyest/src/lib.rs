//! Simulation of Gamma and variance Gamma Levy processes, nonparametric
//! estimation of their Levy densities by projection and penalized-projection
//! estimators, parametric calibration on top of the nonparametric output,
//! and a seeded Monte Carlo harness that verifies the estimators' risk,
//! oracle, and convergence behavior.
//!
//! The crate is organized by pipeline stage:
//!
//! * [`sim`] — jump-set and discrete-skeleton simulation;
//! * [`projection`] — linear models, orthonormal bases, contrast, and
//!   projection estimators;
//! * [`selection`] — penalty forms, admissibility, penalized selection;
//! * [`discrete`] — the same estimators driven by equally spaced increments;
//! * [`fitting`] — least-squares, maximum-likelihood, and method-of-moments
//!   parameter fits;
//! * [`evaluation`] — Monte Carlo risk tables and the empirical checks;
//! * [`io`] — CSV/JSON formats shared with the command-line tool.

pub mod discrete;
pub mod error;
pub mod evaluation;
pub mod fitting;
pub mod io;
pub mod projection;
pub mod quad;
pub mod rng;
pub mod selection;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
