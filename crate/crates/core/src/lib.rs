//! Quantization and weak-covering statistics for vertex designs of the cube
//! `[-1,1]^d`.
//!
//! The central object is the `2^(d-1)`-point design on the even-parity sign
//! vertices of `[-delta,delta]^d`, together with the full vertex design on
//! `[-1/2,1/2]^d` and a Sobol comparison design. The crate provides
//!
//! * closed forms for the mean squared quantization error and its
//!   size-normalized version,
//! * ball-cube intersection fractions via an Edgeworth-corrected normal
//!   approximation, with Monte Carlo cross-checks,
//! * coverage fractions, covering radii and covering thickness for the
//!   designs, and
//! * a CLI (`cubecover`) that emits all of the above as CSV tables.
//!
//! All Monte Carlo estimators are deterministic per `(seed, samples)`
//! regardless of how many worker threads execute them.

pub mod cli;
pub mod coverage;
pub mod designs;
pub mod error;
pub mod mc;
pub mod normal;
pub mod quad;
pub mod quantization;
pub mod sobol;

pub use error::{Error, Result};
