//! Thermomechanical models of shape-memory-alloy bars and slabs.
//!
//! - [`constitutive`]: 1D Landau-Devonshire free energy and its derivatives.
//! - [`invariants3d`]: cubic strain invariants and the 3D free energy.
//! - [`heat_flux`]: Fourier, Cattaneo-Vernotte and rate-corrected flux laws.
//! - [`solver1d`]: staggered-grid solver for the coupled 1D bar.
//! - [`slab`]: reduced thin-slab model and cross-slab reconstruction.
//! - [`config`]: TOML run configuration and built-in presets.
//! - [`runner`]: runs a configuration and writes CSV artifacts.
//! - [`ode`]: explicit RK4 and implicit BDF2 time steppers.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constitutive;
pub mod error;
pub mod heat_flux;
pub mod invariants3d;
pub mod ode;
pub mod runner;
pub mod slab;
pub mod solver1d;

pub use error::{Error, Result};
