//! Numerical laboratory for concentration in first passage percolation.
//!
//! The crate has three layers:
//!
//! * [`distributions`], [`averaging`] and [`funcineq`] are exact or
//!   quadrature-based tools: edge-time laws with tail-accurate Gaussian
//!   transport, the nearly-gamma classifier, the truncated laws `nu_k`, the
//!   randomising offset map `g_m`, and brute-force checks of the modified
//!   Poincaré and log-Sobolev inequalities on small product spaces.
//! * [`fpp`] solves first passage percolation on finite lattice boxes and
//!   computes per-edge influence quantities.
//! * [`experiments`] runs reproducible Monte Carlo studies on top of it.
//!
//! The `fpplab` binary exposes the same functionality on the command line
//! through [`cli::run`].

pub mod averaging;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod fpp;
pub mod funcineq;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
