//! First-order reflection kernel of a sinusoidally corrugated mirror.
//!
//! This file quarantines the one externally sourced formula of the crate:
//! the 2x2 matrix coupling (TE, TM) at the incoming wavevector to (TE, TM)
//! at the outgoing wavevector, to first order in the corrugation amplitude
//! (Rayleigh perturbation of the Fresnel problem). Everything else in the
//! crate treats it as a black box pinned down by three limits, all tested
//! here or downstream:
//!
//!  1. specular limit: as out -> in the kernel reduces to
//!     diag(2 kappa r_TE, 2 kappa r_TM), which makes G(0) = e''_PP exactly;
//!  2. perfect-mirror limit: the plasma entries approach the ideal-mirror
//!     entries as lambda_P -> 0;
//!  3. plane-of-incidence symmetry: no polarization mixing when the
//!     incoming and outgoing wavevectors are collinear.
//!
//! A sinusoidal profile diffracts into both +k and -k first orders with
//! the same kernel; their interference is what produces the cos(k b)
//! dependence assembled downstream, so this function takes whichever of
//! the two orders the caller selected via `out_kvec`.
//!
//! Entries are per unit corrugation amplitude (units rad/m) and are kept
//! in a form with no cancelling differences: for the plasma model the
//! combinations eps - 1 and 1 - 1/eps are evaluated from omega_P and xi
//! directly, so the kernel stays accurate both at xi >> omega_P (where
//! eps - 1 underflows in a naive evaluation) and at xi -> 0 (where eps
//! itself overflows).

use super::{EvaluationPoint, MirrorError, ReflectionMatrix};
use crate::model::{Material, C};

/// Relative slack for the first-diffraction-order precondition, covering
/// rounding in the caller's construction of out = in +/- k.
const ORDER_MATCH_TOL: f64 = 1e-9;

/// First-order reflection matrix of a corrugated plate, taking polarization
/// (column) at `in_point` to polarization (row) at `out_kvec`.
pub fn nonspecular_first_order(
    in_point: &EvaluationPoint,
    out_kvec: [f64; 2],
    corrugation_k: f64,
    material: &Material,
) -> Result<ReflectionMatrix, MirrorError> {
    let delta_x = out_kvec[0] - in_point.kvec[0];
    let delta_y = out_kvec[1] - in_point.kvec[1];
    let scale = in_point
        .k_mag()
        .max((out_kvec[0] * out_kvec[0] + out_kvec[1] * out_kvec[1]).sqrt())
        .max(corrugation_k.abs());
    let mismatch = (corrugation_k <= 0.0 || corrugation_k.is_nan())
        || (delta_x.abs() - corrugation_k).abs() > ORDER_MATCH_TOL * scale
        || delta_y.abs() > ORDER_MATCH_TOL * scale;
    if mismatch {
        return Err(MirrorError::WavevectorMismatch { delta_x, delta_y, corrugation_k });
    }
    Ok(kernel(in_point, out_kvec, material))
}

/// The matrix elements, without the diffraction-order precondition, so the
/// specular limit out == in stays testable.
fn kernel(in_point: &EvaluationPoint, out_kvec: [f64; 2], material: &Material) -> ReflectionMatrix {
    let k0 = in_point.xi / C;
    let u_in = in_point.k_mag();
    let u_out = (out_kvec[0] * out_kvec[0] + out_kvec[1] * out_kvec[1]).sqrt();
    let (cos_t, sin_t) = relative_angle(in_point.kvec, out_kvec, u_in * u_out);

    let (te_te, te_tm, tm_te, tm_tm) = match material.plasma_frequency() {
        None => {
            let kap_in = (u_in * u_in + k0 * k0).sqrt();
            let kap_out = (u_out * u_out + k0 * k0).sqrt();
            (
                -2.0 * kap_in * cos_t,
                2.0 * k0 * sin_t,
                2.0 * k0 * (kap_in / kap_out) * sin_t,
                2.0 * (u_in * u_out + k0 * k0 * cos_t) / kap_out,
            )
        }
        Some(omega_p) => {
            let wp = omega_p / C;
            let k0_2 = k0 * k0;
            let wp2 = wp * wp;
            // 1/eps and 1 - 1/eps without forming eps itself
            let inv_eps = k0_2 / (k0_2 + wp2);
            let one_minus_inv = wp2 / (k0_2 + wp2);
            let kap_in = (u_in * u_in + k0_2).sqrt();
            let kap_out = (u_out * u_out + k0_2).sqrt();
            let kt_in = (u_in * u_in + k0_2 + wp2).sqrt();
            let kt_out = (u_out * u_out + k0_2 + wp2).sqrt();
            let d_te_in = kap_in + kt_in;
            let d_te_out = kap_out + kt_out;
            let d_tm_in = kap_in + kt_in * inv_eps;
            let d_tm_out = kap_out + kt_out * inv_eps;
            (
                // (eps - 1) k0^2 = wp^2 exactly for the plasma model
                -2.0 * wp2 * kap_in * cos_t / (d_te_in * d_te_out),
                2.0 * k0 * kap_in * kt_in * sin_t * one_minus_inv / (d_tm_in * d_te_out),
                2.0 * k0 * kap_in * kt_out * sin_t * one_minus_inv / (d_te_in * d_tm_out),
                2.0 * kap_in
                    * one_minus_inv
                    * (u_in * u_out + kt_in * kt_out * cos_t * inv_eps)
                    / (d_tm_in * d_tm_out),
            )
        }
    };
    ReflectionMatrix { entries: [[te_te, te_tm], [tm_te, tm_tm]] }
}

/// Cosine and sine of the angle from the incoming to the outgoing
/// wavevector. Either vector vanishing makes the angle immaterial (every
/// entry it multiplies carries a factor that vanishes with it, or sits on
/// a measure-zero set of the integrals); (1, 0) keeps the kernel finite.
fn relative_angle(k_in: [f64; 2], k_out: [f64; 2], norm_product: f64) -> (f64, f64) {
    if norm_product == 0.0 {
        return (1.0, 0.0);
    }
    let cos_t = (k_in[0] * k_out[0] + k_in[1] * k_out[1]) / norm_product;
    let sin_t = (k_in[0] * k_out[1] - k_in[1] * k_out[0]) / norm_product;
    (cos_t, sin_t)
}
