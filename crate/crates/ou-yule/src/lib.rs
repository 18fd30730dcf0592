//! Simulation and numerical verification toolkit for the spurious
//! ("nonsense") correlation of two independent Ornstein-Uhlenbeck paths.
//!
//! Two independent mean-reverting processes observed on a finite window look
//! correlated: their empirical correlation `rho` does not concentrate at 0
//! for fixed horizons, and even as the horizon grows it dies off slowly, at
//! rate `1/sqrt(T)`. This crate provides the pieces needed to study that
//! effect end to end:
//!
//! - [`ou_sim`]: exact-transition and Euler simulation of paired OU paths on
//!   uniform grids, with reproducible counter-derived random substreams
//!   ([`rng`]).
//! - [`yule_stats`]: the empirical correlation of the paths (discrete
//!   left-endpoint and trapezoid variants) and its CLT standardization
//!   `psi = sqrt(theta T_n) rho`, which is asymptotically standard normal.
//! - [`analytic`]: closed forms for the variance of the underlying quadratic
//!   functional, its large-`T` limits, Kolmogorov-distance rate bounds in
//!   both the continuous-observation and discrete-sampling regimes, mesh
//!   planning for the in-fill asymptotics, and moment/tail bounds for
//!   second-chaos variables.
//! - [`chaos_kernel`]: the integral kernels whose spectra drive those
//!   results, with quadrature norms, contractions, and a Nystrom
//!   eigendecomposition.
//! - [`mc_harness`]: deterministic parallel Monte Carlo with summaries,
//!   ECDFs, histograms, and the Kolmogorov distance to the normal.
//! - [`cli`] / [`io`]: a reproducible command-line surface emitting
//!   provenance-stamped, byte-stable CSV and JSON artifacts.
//!
//! The `examples/` directory exercises each capability as a runnable
//! program; `ou-yule help` lists the command-line equivalents.

pub mod analytic;
pub mod chaos_kernel;
pub mod cli;
pub mod error;
pub mod io;
pub mod mc_harness;
pub mod normal;
pub mod ou_sim;
pub mod rng;
pub mod yule_stats;

pub use error::{Error, Result};
