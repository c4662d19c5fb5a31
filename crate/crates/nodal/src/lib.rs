//! Invariant Gaussian random fields on homogeneous spaces and the
//! statistics of their zero sets.
//!
//! The crate builds Gaussian fields whose law is invariant under the full
//! isometry group of the line, plane, 3-space, unit sphere or hyperbolic
//! disk, evaluates them with exact first derivatives, measures the size of
//! their zero sets by Monte Carlo (crossing counts on geodesics, isolated
//! zeros, nodal-line length) and compares the measurements with the
//! analytic Kac-Rice predictions. The headline quantity is dimensionless:
//! zero-set density times the volume of an elementary cell, which depends
//! only on the dimensions of the base and value spaces and not on which
//! symmetry group acts.
//!
//! Modules, bottom up:
//!
//! * [`geometry`] — the five model spaces, distances, geodesics, region
//!   grids with exact area weights;
//! * [`specfun`] — Bessel/Legendre evaluation and the boundary-circle
//!   quadrature for hyperbolic spherical functions;
//! * [`spectra`] — spectral parameters, eigenvalues, covariance functions
//!   and discrete spectral mixtures;
//! * [`sampler`] — seeded field realizations with exact gradients;
//! * [`zeroset`] — crossing counts, point-zero counts, nodal length;
//! * [`rice`] — analytic predictions in the two spacing conventions and
//!   both constant modes;
//! * [`harness`] — reproducible Monte-Carlo experiments with reports;
//! * [`raster`], [`cli`] — file dumps and the command-line surface.
//!
//! The runnable examples under `examples/` walk through each capability;
//! `cargo run --release --example universality` reproduces the central
//! experiment.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod raster;
pub mod rice;
pub mod sampler;
pub mod specfun;
pub mod spectra;
pub mod zeroset;

pub use error::{Error, Result};
