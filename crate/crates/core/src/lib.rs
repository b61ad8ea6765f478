//! Numerical laboratory for the plate equation u_tt + Δ²u = 0 and its
//! σ-evolution u_tt + (−Δ)^σ u = 0 with closed-form polynomial×Gaussian data.
//!
//! The solution is evaluated exactly in Fourier space. Every L² quantity is
//! reduced to a one-dimensional radial integral of sphere-averaged profiles,
//! which the [`quadrature`] module integrates with phase-aligned panels.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod model;
pub mod propagator;
pub mod quadrature;
pub mod scenarios;
pub mod spectra;
pub mod sphere;

pub use error::{Error, Result};
pub use model::{build_data, DataCombo, DataPrimitive, Moments, Problem};
pub use quadrature::{Band, Estimate, Oscillation, QuadConfig};
pub use spectra::{spectral_profiles, PolyGaussRadial, SpectralProfiles};
