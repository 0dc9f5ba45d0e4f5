//! Electromagnetic response of a single plate: the plasma-model dielectric
//! function on the imaginary frequency axis, specular Fresnel amplitudes,
//! and the first-order nonspecular kernel of a corrugated surface.
//!
//! Sign convention: r_TE < 0 and r_TM > 0 at a vacuum-metal interface.
//! Conventions differ across the literature; every observable downstream
//! involves products of two reflections, so only relative signs matter,
//! and the test suite pins this choice.

mod nonspecular;

pub use nonspecular::nonspecular_first_order;

use crate::model::{Material, C};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MirrorError {
    #[error("imaginary frequency must be positive, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("wavevector components must be finite, got ({0}, {1})")]
    NonFiniteWavevector(f64, f64),
    #[error("perfect mirror has no dielectric function")]
    NoDielectricFunction,
    #[error(
        "outgoing minus incoming wavevector ({delta_x}, {delta_y}) rad/m is not \
         a first diffraction order (+/-{corrugation_k} rad/m along the corrugation axis)"
    )]
    WavevectorMismatch { delta_x: f64, delta_y: f64, corrugation_k: f64 },
}

/// A point on the imaginary-frequency axis with a transverse wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPoint {
    /// Imaginary angular frequency (rad/s), strictly positive.
    pub xi: f64,
    /// Transverse wavevector (rad/m); the corrugation axis is x.
    pub kvec: [f64; 2],
}

impl EvaluationPoint {
    pub fn new(xi: f64, kvec: [f64; 2]) -> Result<Self, MirrorError> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(MirrorError::NonPositiveFrequency(xi));
        }
        if !(kvec[0].is_finite() && kvec[1].is_finite()) {
            return Err(MirrorError::NonFiniteWavevector(kvec[0], kvec[1]));
        }
        Ok(Self { xi, kvec })
    }

    pub fn k_mag(&self) -> f64 {
        (self.kvec[0] * self.kvec[0] + self.kvec[1] * self.kvec[1]).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te = 0,
    Tm = 1,
}

/// 2x2 reflection amplitude matrix over (TE, TM), stored as
/// `entries[outgoing][incoming]`. Dimensionless for specular reflection,
/// inverse length per unit corrugation amplitude for the first-order
/// nonspecular kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionMatrix {
    pub entries: [[f64; 2]; 2],
}

impl ReflectionMatrix {
    pub fn diagonal(r_te: f64, r_tm: f64) -> Self {
        Self { entries: [[r_te, 0.0], [0.0, r_tm]] }
    }

    pub fn at(&self, outgoing: Polarization, incoming: Polarization) -> f64 {
        self.entries[outgoing as usize][incoming as usize]
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries[0][1] == 0.0 && self.entries[1][0] == 0.0
    }

    /// The same kernel seen from the opposite plate. Mirroring through the
    /// mid-plane reverses the surface normal, which flips the handedness of
    /// the (TE, TM) frame and with it the sign of the polarization mixing.
    pub fn facing(self) -> Self {
        let e = self.entries;
        Self { entries: [[e[0][0], -e[0][1]], [-e[1][0], e[1][1]]] }
    }
}

/// Plasma-model permittivity on the imaginary axis, eps(i xi) = 1 + (omega_P/xi)^2.
pub fn epsilon_plasma(xi: f64, material: &Material) -> Result<f64, MirrorError> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(MirrorError::NonPositiveFrequency(xi));
    }
    match material.plasma_frequency() {
        Some(omega_p) => Ok(1.0 + (omega_p / xi) * (omega_p / xi)),
        None => Err(MirrorError::NoDielectricFunction),
    }
}

/// Axial decay constant sqrt(|k|^2 + eps (xi/c)^2) in rad/m. With eps = 1
/// this is the vacuum kappa of the e^{-2 kappa L} propagation factors.
pub fn kappa(point: &EvaluationPoint, epsilon: f64) -> f64 {
    debug_assert!(epsilon >= 1.0);
    let k2 = point.kvec[0] * point.kvec[0] + point.kvec[1] * point.kvec[1];
    let xi_c = point.xi / C;
    (k2 + epsilon * xi_c * xi_c).sqrt()
}

/// Specular Fresnel amplitudes at a flat interface; diagonal in (TE, TM).
pub fn specular_reflection(point: &EvaluationPoint, material: &Material) -> ReflectionMatrix {
    match material {
        Material::PerfectMirror => ReflectionMatrix::diagonal(-1.0, 1.0),
        Material::PlasmaModel { .. } => {
            let eps = epsilon_plasma(point.xi, material)
                .expect("positive xi and plasma material checked by construction");
            let k_vac = kappa(point, 1.0);
            let k_med = kappa(point, eps);
            ReflectionMatrix::diagonal(
                (k_vac - k_med) / (k_vac + k_med),
                (eps * k_vac - k_med) / (eps * k_vac + k_med),
            )
        }
    }
}
