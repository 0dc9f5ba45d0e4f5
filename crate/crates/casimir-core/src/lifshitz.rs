//! Plane-plane Casimir energy per unit area and its separation
//! derivatives at zero temperature.
//!
//! e_PP(L) = (hbar / 4 pi^2) int dxi int u du sum_p ln(1 - rho_p), with
//! rho_p = r_p^2 e^{-2 kappa L} the specular round-trip factor. The
//! azimuthal k-integral is trivial for flat plates, so the double integral
//! is two nested half-line quadratures. Derivatives are taken under the
//! integral sign analytically: each d/dL pulls down the closed-form
//! derivative of ln(1 - rho), so no finite differencing of quadrature
//! results is involved.
//!
//! Integration runs in scaled variables x = xi L / c, t = |k| L, keeping
//! every exponent and magnitude near unity; the L and hbar c powers are
//! restored in a single prefactor per component.

use crate::mirrors::{specular_reflection, EvaluationPoint, Polarization};
use crate::model::{Material, C, HBAR};
use crate::quadrature::{integrate_half_line, QuadratureError, QuadratureSpec};
use std::f64::consts::PI;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LifshitzError {
    #[error("separation must be positive, got {0} m")]
    NonPositiveSeparation(f64),
    #[error("plasma wavelength must be positive, got {0} m")]
    InvalidPlasmaWavelength(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(
        "{quantity} did not converge: value {value:e}, \
         error estimate {error_estimate:e} above tolerance after {evaluations} evaluations"
    )]
    NonConvergence { quantity: &'static str, value: f64, error_estimate: f64, evaluations: usize },
}

/// Plane-plane energy per area and its first two separation derivatives.
#[derive(Debug, Clone, Copy)]
pub struct PlaneEnergyResult {
    /// e_PP(L) in J/m^2, negative (binding).
    pub e_pp: f64,
    /// e'_PP(L) in J/m^3, positive; the attractive force per area is -e'_PP.
    pub d1: f64,
    /// e''_PP(L) in J/m^4, negative.
    pub d2: f64,
    /// Quadrature error estimates for (e_pp, d1, d2).
    pub error_estimates: [f64; 3],
    pub material: Material,
    pub l: f64,
}

/// Closed form -pi^2 hbar c / (720 L^3) for ideal mirrors.
pub fn perfect_mirror_e_pp(l: f64) -> f64 {
    -PI * PI * HBAR * C / (720.0 * l.powi(3))
}

/// Closed form +pi^2 hbar c / (240 L^4).
pub fn perfect_mirror_d1(l: f64) -> f64 {
    PI * PI * HBAR * C / (240.0 * l.powi(4))
}

/// Closed form -pi^2 hbar c / (60 L^5).
pub fn perfect_mirror_d2(l: f64) -> f64 {
    -PI * PI * HBAR * C / (60.0 * l.powi(5))
}

#[derive(Clone, Copy)]
enum Component {
    Energy,
    FirstDerivative,
    SecondDerivative,
}

impl Component {
    fn name(self) -> &'static str {
        match self {
            Component::Energy => "plane energy integral",
            Component::FirstDerivative => "plane energy first derivative integral",
            Component::SecondDerivative => "plane energy second derivative integral",
        }
    }

    /// Scaled integrand term for one polarization: the function of
    /// K = kappa L and rho = r^2 e^{-2K} whose (t, x) integral gives the
    /// component up to the prefactor below.
    fn term(self, kappa_l: f64, rho: f64) -> f64 {
        match self {
            Component::Energy => (-rho).ln_1p(),
            Component::FirstDerivative => 2.0 * kappa_l * rho / (1.0 - rho),
            Component::SecondDerivative => {
                let denom = 1.0 - rho;
                -4.0 * kappa_l * kappa_l * rho / (denom * denom)
            }
        }
    }

    /// hbar c / (4 pi^2 L^n) with n = 3, 4, 5.
    fn prefactor(self, l: f64) -> f64 {
        let base = HBAR * C / (4.0 * PI * PI);
        match self {
            Component::Energy => base / l.powi(3),
            Component::FirstDerivative => base / l.powi(4),
            Component::SecondDerivative => base / l.powi(5),
        }
    }
}

fn check_inputs(l: f64, material: &Material) -> Result<(), LifshitzError> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(LifshitzError::NonPositiveSeparation(l));
    }
    if let Material::PlasmaModel { lambda_p } = material {
        if !(*lambda_p > 0.0 && lambda_p.is_finite()) {
            return Err(LifshitzError::InvalidPlasmaWavelength(*lambda_p));
        }
    }
    Ok(())
}

fn component_integral(
    component: Component,
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), LifshitzError> {
    check_inputs(l, material)?;
    // x and t both peak near 1/2 in scaled variables
    let outer_spec = spec.scaled(0.5);
    let inner_spec = QuadratureSpec { rel_tol: 0.2 * spec.rel_tol, ..outer_spec };

    // inner quadrature problems surface after the outer pass completes
    let inner_failure: Mutex<Option<LifshitzError>> = Mutex::new(None);

    let outer = integrate_half_line(
        |x| {
            let xi = x * C / l;
            let inner = integrate_half_line(
                |t| {
                    let point = EvaluationPoint { xi, kvec: [t / l, 0.0] };
                    let r = specular_reflection(&point, material);
                    let kappa_l = (t * t + x * x).sqrt();
                    let decay = (-2.0 * kappa_l).exp();
                    let r_te = r.at(Polarization::Te, Polarization::Te);
                    let r_tm = r.at(Polarization::Tm, Polarization::Tm);
                    let sum = component.term(kappa_l, r_te * r_te * decay)
                        + component.term(kappa_l, r_tm * r_tm * decay);
                    t * sum
                },
                &inner_spec,
            );
            match inner {
                Ok(res) => {
                    if !res.converged {
                        let mut slot = inner_failure.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(LifshitzError::NonConvergence {
                                quantity: component.name(),
                                value: res.value,
                                error_estimate: res.error_estimate,
                                evaluations: res.evaluations,
                            });
                        }
                    }
                    res.value
                }
                Err(QuadratureError::EvaluationFailure { .. }) => f64::NAN,
                Err(err) => {
                    let mut slot = inner_failure.lock().unwrap();
                    if slot.is_none() {
                        *slot = Some(err.into());
                    }
                    f64::NAN
                }
            }
        },
        &outer_spec,
    )?;

    if let Some(err) = inner_failure.into_inner().unwrap() {
        return Err(err);
    }
    if !outer.converged {
        return Err(LifshitzError::NonConvergence {
            quantity: component.name(),
            value: outer.value,
            error_estimate: outer.error_estimate,
            evaluations: outer.evaluations,
        });
    }
    let pre = component.prefactor(l);
    Ok((pre * outer.value, pre * outer.error_estimate))
}

/// e_PP(L) with both derivatives, each by its own integral.
pub fn energy_per_area(
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<PlaneEnergyResult, LifshitzError> {
    let (e_pp, err_e) = component_integral(Component::Energy, l, material, spec)?;
    let (d1, err_1) = component_integral(Component::FirstDerivative, l, material, spec)?;
    let (d2, err_2) = component_integral(Component::SecondDerivative, l, material, spec)?;
    Ok(PlaneEnergyResult {
        e_pp,
        d1,
        d2,
        error_estimates: [err_e, err_1, err_2],
        material: *material,
        l,
    })
}

/// e'_PP(L) alone (J/m^3).
pub fn energy_first_derivative(
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<f64, LifshitzError> {
    component_integral(Component::FirstDerivative, l, material, spec).map(|(v, _)| v)
}

/// e''_PP(L) alone (J/m^4).
pub fn energy_second_derivative(
    l: f64,
    material: &Material,
    spec: &QuadratureSpec,
) -> Result<f64, LifshitzError> {
    component_integral(Component::SecondDerivative, l, material, spec).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GOLD: Material = Material::PlasmaModel { lambda_p: 137e-9 };

    fn spec(rel: f64) -> QuadratureSpec {
        QuadratureSpec::with_rel_tol(rel)
    }

    #[test]
    fn closed_forms_at_one_micron() {
        assert_relative_eq!(perfect_mirror_e_pp(1e-6), -4.3337525748258449e-10, max_relative = 1e-14);
        assert_relative_eq!(perfect_mirror_d1(1e-6), 1.3001257724477535e-3, max_relative = 1e-14);
        assert_relative_eq!(perfect_mirror_d2(1e-6), -5200.5030897910138, max_relative = 1e-14);
        assert_relative_eq!(perfect_mirror_d2(100e-9), -5.2005030897910138e8, max_relative = 1e-14);
    }

    #[test]
    fn integral_path_matches_closed_forms() {
        let s = spec(1e-8);
        for l in [0.1e-6, 1e-6, 10e-6] {
            let r = energy_per_area(l, &Material::PerfectMirror, &s).unwrap();
            assert_relative_eq!(r.e_pp, perfect_mirror_e_pp(l), max_relative = 1e-4);
            assert_relative_eq!(r.d1, perfect_mirror_d1(l), max_relative = 1e-4);
            assert_relative_eq!(r.d2, perfect_mirror_d2(l), max_relative = 1e-4);
        }
    }

    #[test]
    fn signs_and_material_ordering() {
        let s = spec(1e-7);
        for l in [100e-9, 1e-6] {
            let plasma = energy_per_area(l, &GOLD, &s).unwrap();
            let perfect = energy_per_area(l, &Material::PerfectMirror, &s).unwrap();
            for r in [&plasma, &perfect] {
                assert!(r.e_pp < 0.0);
                assert!(r.d1 > 0.0);
                assert!(r.d2 < 0.0);
            }
            // finite conductivity reduces every magnitude
            assert!(plasma.e_pp.abs() < perfect.e_pp.abs());
            assert!(plasma.d1 < perfect.d1);
            assert!(plasma.d2.abs() < perfect.d2.abs());
        }
    }

    #[test]
    fn magnitude_decreases_with_separation() {
        let s = spec(1e-7);
        let near = energy_per_area(0.5e-6, &GOLD, &s).unwrap();
        let far = energy_per_area(1.5e-6, &GOLD, &s).unwrap();
        assert!(near.e_pp.abs() > far.e_pp.abs());
    }

    #[test]
    fn second_derivative_power_law_for_perfect_mirrors() {
        let s = spec(1e-8);
        let scaled: Vec<f64> = [0.2e-6, 1e-6, 5e-6]
            .iter()
            .map(|&l| {
                energy_second_derivative(l, &Material::PerfectMirror, &s).unwrap() * l.powi(5)
            })
            .collect();
        for pair in scaled.windows(2) {
            assert_relative_eq!(pair[0], pair[1], max_relative = 1e-4);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let s = spec(1e-9);
        for material in [GOLD, Material::PerfectMirror] {
            for l in [100e-9, 1e-6] {
                let h = 5e-3 * l;
                let e = |l: f64| energy_per_area(l, &material, &s).unwrap().e_pp;
                let (em, e0, ep) = (e(l - h), e(l), e(l + h));
                let fd1 = (ep - em) / (2.0 * h);
                let fd2 = (ep - 2.0 * e0 + em) / (h * h);
                let d1 = energy_first_derivative(l, &material, &s).unwrap();
                let d2 = energy_second_derivative(l, &material, &s).unwrap();
                assert_relative_eq!(d1, fd1, max_relative = 1e-3);
                assert_relative_eq!(d2, fd2, max_relative = 1e-3);
            }
        }
    }

    #[test]
    fn plasma_converges_to_perfect_mirror() {
        let s = spec(1e-8);
        let l = 1e-6;
        let plasma = energy_per_area(l, &Material::PlasmaModel { lambda_p: 1e-3 * l }, &s).unwrap();
        let perfect = energy_per_area(l, &Material::PerfectMirror, &s).unwrap();
        let rel = ((plasma.e_pp - perfect.e_pp) / perfect.e_pp).abs();
        assert!(rel < 1e-3, "relative gap {rel}");
    }

    #[test]
    fn long_distance_ratio_approaches_one_monotonically() {
        let s = spec(1e-8);
        let lambda_p = 137e-9;
        let mut prev = 0.0;
        for ratio in [1.0, 5.0, 20.0, 100.0] {
            let l = ratio * lambda_p;
            let plasma = energy_per_area(l, &Material::PlasmaModel { lambda_p }, &s).unwrap();
            let r = plasma.e_pp / perfect_mirror_e_pp(l);
            assert!(r > prev && r < 1.0, "ratio {r} at L/lambda_P = {ratio}");
            prev = r;
        }
        assert!(prev > 0.98);
    }

    #[test]
    fn starved_budget_reports_nonconvergence() {
        let s = QuadratureSpec { rel_tol: 1e-12, max_subdivisions: 1, ..Default::default() };
        let err = energy_per_area(1e-6, &Material::PerfectMirror, &s).unwrap_err();
        assert!(matches!(err, LifshitzError::NonConvergence { .. }));
    }

    #[test]
    fn rejects_invalid_inputs() {
        let s = QuadratureSpec::default();
        assert!(matches!(
            energy_per_area(0.0, &GOLD, &s),
            Err(LifshitzError::NonPositiveSeparation(_))
        ));
        assert!(matches!(
            energy_per_area(-1e-6, &GOLD, &s),
            Err(LifshitzError::NonPositiveSeparation(_))
        ));
        assert!(matches!(
            energy_per_area(1e-6, &Material::PlasmaModel { lambda_p: 0.0 }, &s),
            Err(LifshitzError::InvalidPlasmaWavelength(_))
        ));
    }

    #[test]
    fn error_estimates_are_populated_and_small() {
        let s = spec(1e-7);
        let r = energy_per_area(1e-6, &GOLD, &s).unwrap();
        for (err, value) in r.error_estimates.iter().zip([r.e_pp, r.d1, r.d2]) {
            assert!(*err > 0.0);
            assert!(*err <= 1e-7 * value.abs());
        }
    }
}
