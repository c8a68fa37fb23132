//! Spontaneous (SRS) and correlation-enhanced (CERS) Raman scattering in a
//! one-dimensional atomic ensemble.
//!
//! Two independent routes compute the Stokes output of each stage:
//!
//! * [`analytic`] assembles intensities from the closed-form Bessel kernels
//!   ([`kernels`], [`specfun`]);
//! * [`green`] integrates the coupled light–atom equations directly with a
//!   second-order box scheme and builds numerical impulse responses.
//!
//! Everything runs in dimensionless units: position `ζ = z/L`, time
//! `t̃ = t·χ₁²L/c`, and field operators normalised so that
//! `[e(t̃), e†(t̃')] = δ(t̃ − t̃')` and `[s(ζ), s†(ζ')] = δ(ζ − ζ')`.
//! Intensities are therefore photon fluxes per unit `t̃`; multiply by
//! `χ₁²L²/c²` to recover the dimensional `⟨Ê†Ê⟩`.

pub mod analytic;
pub mod error;
pub mod fringe;
pub mod green;
pub mod kernels;
pub mod matrix;
pub mod params;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
