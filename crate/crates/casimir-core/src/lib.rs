//! Casimir interaction between two sinusoidally corrugated metallic plates,
//! to second order in the corrugation amplitudes.
//!
//! The crossed-amplitude part of the energy per unit area is
//!
//! ```text
//! dE/(Lx Ly) = (a1 a2 / 2) G(k) cos(k b) sinc(k Ly theta / 2)
//! ```
//!
//! where `G(k)` is the corrugation response function at corrugation
//! wavenumber `k = 2 pi / lambda_C` and separation `L`. `G` is computed
//! three ways: the exact scattering approach (plasma-model mirrors), the
//! same with perfect mirrors, and the proximity-force approximation
//! `G(0) = e''_PP(L)` built on the Lifshitz plane-plane energy.
//!
//! Modules mirror that pipeline: [`model`] (parameters, constants, sinc),
//! [`quadrature`] (adaptive integration engine), [`mirrors`] (Fresnel and
//! first-order nonspecular reflection), [`lifshitz`] (plane-plane energy
//! and derivatives), [`response`] (G itself), [`observables`] (energy
//! landscape, torque, lateral force, sweeps), and [`checks`] (the built-in
//! verification suite shipped with the CLI).

pub mod checks;
pub mod exec;
pub mod lifshitz;
pub mod mirrors;
pub mod model;
pub mod observables;
pub mod quadrature;
pub mod response;
