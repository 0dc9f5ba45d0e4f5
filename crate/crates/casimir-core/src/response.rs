//! The corrugation response function G(k).
//!
//! G(k) is the kernel of the second-order crossed energy correction: per
//! unit plate area, dE = (a1 a2 / 2) G(k) cos(k b) once both corrugations
//! are aligned. The exact scattering form integrates, over imaginary
//! frequency and the transverse wavevector plane, the trace of one
//! round trip that scatters off each corrugation once:
//!
//!   G(k) = -(hbar / 8 pi^3) int dxi int d^2k' sum_{p,q}
//!          F_p(k') R1[p][q](k'+k -> k') F_q(k'+k) R2[q][p](k' -> k'+k)
//!
//! with F_p(k) = e^{-kappa L} / (1 - r_p^2 e^{-2 kappa L}) the open
//! round-trip factor and R1, R2 the first-order kernels of the two plates
//! (R2 is the facing-plate variant). The integrand is positive pointwise,
//! so G < 0 always. Both +/-k diffraction orders contribute equal crossed
//! terms; their interference is the cos(k b) carried by the observables,
//! not part of G itself.
//!
//! The proximity-force approximation replaces G(k) by its k -> 0 limit,
//! which equals e''_PP(L) exactly; that theorem doubles as the strongest
//! test of the kernel, and as the k = 0 evaluation path.

use crate::lifshitz::{energy_second_derivative, LifshitzError};
use crate::mirrors::{
    kappa, nonspecular_first_order, specular_reflection, EvaluationPoint, Polarization,
};
use crate::model::{Material, C, HBAR};
use crate::quadrature::{
    integrate_half_line_with_error, integrate_plane_polar, QuadratureError, QuadratureSpec,
};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResponseError {
    #[error("corrugation wavenumber must be nonnegative and finite, got {0} rad/m")]
    InvalidWavenumber(f64),
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(
        "response integral did not converge at k = {k} rad/m: value {value:e}, \
         error estimate {error_estimate:e} above tolerance"
    )]
    NonConvergence { k: f64, value: f64, error_estimate: f64 },
}

/// How a response value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Exact scattering evaluation with the configured material.
    Scattering,
    /// Proximity-force approximation, G(k) := e''_PP(L).
    Pfa,
    /// Scattering evaluation with ideal mirrors regardless of material.
    PerfectScattering,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Scattering => "scattering",
            Method::Pfa => "pfa",
            Method::PerfectScattering => "perfect",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ResponseSample {
    pub k: f64,
    pub l: f64,
    pub material: Material,
    pub method: Method,
    /// G(k) in J/m^4, negative.
    pub value: f64,
    pub error_estimate: f64,
}

/// Tolerance the response integrals are tuned for by default; tighter
/// requests are honored at proportional cost.
pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec { rel_tol: 1e-5, ..Default::default() }
}

#[derive(PartialEq, Eq, Hash, Clone, Copy)]
struct CacheKey {
    k: u64,
    l: u64,
    perfect: bool,
    lambda_p: u64,
    rel_tol: u64,
    abs_tol: u64,
}

impl CacheKey {
    fn new(k: f64, l: f64, material: &Material, spec: &QuadratureSpec) -> Self {
        let (perfect, lambda_p) = match material {
            Material::PerfectMirror => (true, 0.0),
            Material::PlasmaModel { lambda_p } => (false, *lambda_p),
        };
        Self {
            k: k.to_bits(),
            l: l.to_bits(),
            perfect,
            lambda_p: lambda_p.to_bits(),
            rel_tol: spec.rel_tol.to_bits(),
            abs_tol: spec.abs_tol.to_bits(),
        }
    }
}

fn cache() -> &'static Mutex<HashMap<CacheKey, (f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, (f64, f64)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Drop all memoized scattering samples (e.g. between benchmark passes).
pub fn clear_cache() {
    cache().lock().unwrap().clear();
}

/// Open round-trip factors e^{-kappa L} / (1 - r_p^2 e^{-2 kappa L}) for
/// (TE, TM) at one evaluation point.
fn round_trip_factors(point: &EvaluationPoint, material: &Material, l: f64) -> [f64; 2] {
    let r = specular_reflection(point, material);
    let decay = (-kappa(point, 1.0) * l).exp();
    let d2 = decay * decay;
    let r_te = r.at(Polarization::Te, Polarization::Te);
    let r_tm = r.at(Polarization::Tm, Polarization::Tm);
    [decay / (1.0 - r_te * r_te * d2), decay / (1.0 - r_tm * r_tm * d2)]
}

/// The (y, phi)-plane integrand of -8 pi^3 G / hbar at fixed xi: the
/// polarization trace of one crossed round trip, k' = y(cos phi, sin phi).
fn crossed_trace(xi: f64, y: f64, phi: f64, k: f64, l: f64, material: &Material) -> f64 {
    let k1 = [y * phi.cos(), y * phi.sin()];
    let k2 = [k1[0] + k, k1[1]];
    let p1 = EvaluationPoint { xi, kvec: k1 };
    let p2 = EvaluationPoint { xi, kvec: k2 };
    let (Ok(r1), Ok(r2)) = (
        nonspecular_first_order(&p2, k1, k, material),
        nonspecular_first_order(&p1, k2, k, material),
    ) else {
        return f64::NAN; // unreachable by construction; surfaces as EvaluationFailure
    };
    let r2 = r2.facing();
    let f1 = round_trip_factors(&p1, material, l);
    let f2 = round_trip_factors(&p2, material, l);
    let mut trace = 0.0;
    for (p, fp) in f1.iter().enumerate() {
        for (q, fq) in f2.iter().enumerate() {
            trace += fp * r1.entries[p][q] * fq * r2.entries[q][p];
        }
    }
    trace
}

fn g_scattering_integral(
    k: f64,
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), ResponseError> {
    // Split the budget: 0.6 to the frequency axis, 0.3 to the integrated
    // plane errors, leaving headroom for inner samples that stop short of
    // their own target (sub-resolution features at small xi). The honest
    // total is judged against the caller's full tolerance at the end.
    let outer_spec =
        QuadratureSpec { rel_tol: 0.6 * spec.rel_tol, ..spec.scaled(0.5 * C / l) };
    let inner_spec = QuadratureSpec { rel_tol: 0.3 * spec.rel_tol, ..spec.scaled(0.5 / l) };

    let (outer, inner_error) = integrate_half_line_with_error(
        |xi| {
            match integrate_plane_polar(
                |y, phi| crossed_trace(xi, y, phi, k, l, material),
                &inner_spec,
            ) {
                // a non-converged plane sample still returns its best value;
                // its shortfall rides along in the error component
                Ok(res) => (res.value, res.error_estimate),
                Err(_) => (f64::NAN, f64::NAN),
            }
        },
        &outer_spec,
    )?;

    let pre = HBAR / (8.0 * PI * PI * PI);
    let total_error = outer.error_estimate + inner_error;
    let tolerance = (spec.rel_tol * outer.value.abs()).max(spec.abs_tol);
    if !(outer.converged && total_error <= tolerance) {
        return Err(ResponseError::NonConvergence {
            k,
            value: -pre * outer.value,
            error_estimate: pre * total_error,
        });
    }
    Ok((-pre * outer.value, pre * total_error))
}

fn check_arguments(k: f64, l: f64, material: &Material) -> Result<(), ResponseError> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(ResponseError::InvalidWavenumber(k));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(LifshitzError::NonPositiveSeparation(l).into());
    }
    if let Material::PlasmaModel { lambda_p } = material {
        if !(*lambda_p > 0.0 && lambda_p.is_finite()) {
            return Err(LifshitzError::InvalidPlasmaWavelength(*lambda_p).into());
        }
    }
    Ok(())
}

/// Exact scattering evaluation of G(k). G is even in k, so only k >= 0 is
/// exposed; k = 0 returns e''_PP(L) per the proximity-force theorem rather
/// than a numerical limit. Samples are memoized on (k, L, material,
/// tolerances).
pub fn g_scattering(
    k: f64,
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<ResponseSample, ResponseError> {
    check_arguments(k, l, material)?;
    let key = CacheKey::new(k, l, material, spec);
    if let Some((value, error_estimate)) = cache().lock().unwrap().get(&key).copied() {
        return Ok(ResponseSample {
            k,
            l,
            material: *material,
            method: Method::Scattering,
            value,
            error_estimate,
        });
    }
    let (value, error_estimate) = if k == 0.0 {
        let d2 = energy_second_derivative(l, material, spec)?;
        (d2, spec.rel_tol * d2.abs())
    } else {
        g_scattering_integral(k, l, material, spec)?
    };
    cache().lock().unwrap().insert(key, (value, error_estimate));
    Ok(ResponseSample { k, l, material: *material, method: Method::Scattering, value, error_estimate })
}

/// Proximity-force approximation: G(k) = e''_PP(L) for every k.
pub fn g_pfa(
    k: f64,
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<ResponseSample, ResponseError> {
    check_arguments(k, l, material)?;
    let value = energy_second_derivative(l, material, spec)?;
    Ok(ResponseSample {
        k,
        l,
        material: *material,
        method: Method::Pfa,
        value,
        error_estimate: spec.rel_tol * value.abs(),
    })
}

/// Response by any method; PerfectScattering ignores the configured
/// material in the value but records it in the sample.
pub fn g_sample(
    method: Method,
    k: f64,
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<ResponseSample, ResponseError> {
    match method {
        Method::Scattering => g_scattering(k, l, material, spec),
        Method::Pfa => g_pfa(k, l, material, spec),
        Method::PerfectScattering => {
            let sample = g_scattering(k, l, &Material::PerfectMirror, spec)?;
            Ok(ResponseSample { material: *material, method: Method::PerfectScattering, ..sample })
        }
    }
}

/// G(k)/G(0) in (0, 1]: the beyond-PFA suppression factor.
pub fn g_ratio(
    k: f64,
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<f64, ResponseError> {
    let g_k = g_scattering(k, l, material, spec)?;
    let g_0 = g_scattering(0.0, l, material, spec)?;
    Ok(g_k.value / g_0.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GOLD: Material = Material::PlasmaModel { lambda_p: 137e-9 };
    const L: f64 = 1e-6;

    fn spec() -> QuadratureSpec {
        default_spec()
    }

    #[test]
    fn pfa_is_the_second_derivative_exactly() {
        let s = spec();
        let pfa = g_pfa(2.6e6, 100e-9, &GOLD, &s).unwrap();
        let d2 = energy_second_derivative(100e-9, &GOLD, &s).unwrap();
        assert_eq!(pfa.value, d2);
        assert_eq!(pfa.method, Method::Pfa);
        // and is k-independent
        for k in [0.0, 1e6, 1e7] {
            assert_eq!(g_pfa(k, 100e-9, &GOLD, &s).unwrap().value, pfa.value);
        }
    }

    #[test]
    fn pfa_perfect_mirror_closed_form() {
        let s = spec();
        let pfa = g_pfa(0.0, L, &Material::PerfectMirror, &s).unwrap();
        assert_relative_eq!(pfa.value, -5200.5030897910138, max_relative = 1e-4);
    }

    #[test]
    fn zero_wavenumber_delegates_to_the_theorem() {
        let s = spec();
        for material in [GOLD, Material::PerfectMirror] {
            let g0 = g_scattering(0.0, L, &material, &s).unwrap();
            let d2 = energy_second_derivative(L, &material, &s).unwrap();
            assert_eq!(g0.value, d2);
        }
    }

    #[test]
    fn small_wavenumber_limit_reproduces_second_derivative() {
        // the full kernel path at k L = 1e-4 against e''_PP: this is the
        // theorem G(0) = e''_PP probed through every moving part at once
        let s = spec();
        for material in [GOLD, Material::PerfectMirror] {
            let g = g_scattering(1e-4 / L, L, &material, &s).unwrap();
            let d2 = energy_second_derivative(L, &material, &s).unwrap();
            assert_relative_eq!(g.value, d2, max_relative = 1e-3);
        }
    }

    #[test]
    fn negative_everywhere_sampled() {
        let s = spec();
        for material in [GOLD, Material::PerfectMirror] {
            for l in [100e-9, L] {
                for k_um in [0.1, 2.6, 10.0] {
                    let g = g_scattering(k_um * 1e6, l, &material, &s).unwrap();
                    assert!(
                        g.value < 0.0 && g.error_estimate >= 0.0,
                        "G not negative at k = {k_um} /um, L = {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn ratio_one_at_zero_and_decreasing() {
        let s = spec();
        assert_eq!(g_ratio(0.0, L, &GOLD, &s).unwrap(), 1.0);
        let mut prev = 1.0;
        for k in [0.5e6, 2.6e6, 5e6, 20.0 / L] {
            let r = g_ratio(k, L, &GOLD, &s).unwrap();
            assert!(r > 0.0 && r < prev, "ratio {r} at k = {k} not decreasing");
            prev = r;
        }
    }

    #[test]
    fn pfa_consistent_for_long_corrugations() {
        let s = spec();
        for material in [GOLD, Material::PerfectMirror] {
            let r = g_ratio(0.05 / L, L, &material, &s).unwrap();
            assert!((r - 1.0).abs() <= 1e-2, "kL = 0.05 ratio {r} drifts from PFA");
        }
    }

    #[test]
    fn ideal_mirrors_bound_the_plasma_response() {
        let s = spec();
        for k in [1e6, 2.6e6, 6e6] {
            let plasma = g_scattering(k, L, &GOLD, &s).unwrap();
            let perfect = g_sample(Method::PerfectScattering, k, L, &GOLD, &s).unwrap();
            assert!(perfect.value.abs() > plasma.value.abs());
            assert_eq!(perfect.method, Method::PerfectScattering);
            assert_eq!(perfect.material, GOLD); // records the configured material
        }
    }

    #[test]
    fn corrugation_axis_reflection_symmetry() {
        // reflecting the transverse plane across the corrugation axis
        // (phi -> -phi) leaves the trace invariant: polarization mixing
        // flips sign on both plates at once
        let xi = 0.7 * C / L;
        let k = 2.6e6;
        let s = QuadratureSpec { rel_tol: 1e-7, ..spec().scaled(0.5 / L) };
        let forward = integrate_plane_polar(|y, phi| crossed_trace(xi, y, phi, k, L, &GOLD), &s)
            .unwrap();
        let reversed = integrate_plane_polar(
            |y, phi| crossed_trace(xi, y, 2.0 * PI - phi, k, L, &GOLD),
            &s,
        )
        .unwrap();
        assert!(
            (forward.value - reversed.value).abs() <= 1e-8 * forward.value.abs(),
            "{} vs {}",
            forward.value,
            reversed.value
        );
    }

    #[test]
    fn cache_returns_identical_samples() {
        let s = spec();
        clear_cache();
        let first = g_scattering(3.3e6, L, &GOLD, &s).unwrap();
        let again = g_scattering(3.3e6, L, &GOLD, &s).unwrap();
        assert_eq!(first.value.to_bits(), again.value.to_bits());
        assert_eq!(first.error_estimate.to_bits(), again.error_estimate.to_bits());
        // a different tolerance is a different entry, not a stale hit
        let tighter = QuadratureSpec { rel_tol: 3e-6, ..s };
        let refined = g_scattering(3.3e6, L, &GOLD, &tighter).unwrap();
        assert!(refined.error_estimate < first.error_estimate);
        clear_cache();
    }

    #[test]
    fn rejects_invalid_arguments() {
        let s = spec();
        assert!(matches!(
            g_scattering(-1.0, L, &GOLD, &s),
            Err(ResponseError::InvalidWavenumber(_))
        ));
        assert!(g_scattering(f64::NAN, L, &GOLD, &s).is_err());
        assert!(g_scattering(1e6, 0.0, &GOLD, &s).is_err());
        assert!(g_scattering(1e6, L, &Material::PlasmaModel { lambda_p: -1.0 }, &s).is_err());
        assert!(g_pfa(1e6, -1e-6, &GOLD, &s).is_err());
    }
}

