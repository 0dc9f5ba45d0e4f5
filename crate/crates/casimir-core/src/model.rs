//! Physical constants, run parameters, regime validation, and the sinc
//! machinery behind the rotation profile of the energy correction.

use thiserror::Error;

/// Reduced Planck constant (J s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s), exact by definition.
pub const C: f64 = 299_792_458.0;

/// Below this |x| the sinc series is used; truncation error there is
/// far below double precision, while sin(x)/x starts losing digits.
pub const SINC_SERIES_SWITCH: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("non-positive corrugation period: {0} m")]
    NonPositivePeriod(f64),
}

/// Plate pair geometry, all lengths in meters, angle in radians.
///
/// `l` is the mean separation, `lx`/`ly` the plate extent along and across
/// the corrugation lines, `a1`/`a2` the corrugation amplitudes, `lambda_c`
/// the corrugation period, `b` the lateral offset of the corrugation
/// patterns and `theta` the angle between their directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub l: f64,
    pub lx: f64,
    pub ly: f64,
    pub a1: f64,
    pub a2: f64,
    pub lambda_c: f64,
    pub b: f64,
    pub theta: f64,
}

/// Mirror material on the imaginary-frequency axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Material {
    /// Ideal reflector, |r| = 1 for both polarizations.
    PerfectMirror,
    /// Plasma model eps(i xi) = 1 + (omega_P / xi)^2 with plasma
    /// wavelength `lambda_p` in meters (omega_P = 2 pi c / lambda_p).
    PlasmaModel { lambda_p: f64 },
}

impl Material {
    /// Plasma frequency omega_P = 2 pi c / lambda_P (rad/s), if any.
    pub fn plasma_frequency(&self) -> Option<f64> {
        match *self {
            Material::PerfectMirror => None,
            Material::PlasmaModel { lambda_p } => Some(2.0 * std::f64::consts::PI * C / lambda_p),
        }
    }
}

/// Thresholds for the soft regime checks; the theory only requires the
/// inequalities (a_i << L, lambda_C and Lx, Ly >> lambda_C), the numbers
/// here are our policy defaults.
#[derive(Debug, Clone, Copy)]
pub struct ValidityThresholds {
    /// Warn when a_i exceeds this fraction of min(L, lambda_C).
    pub perturbative_fraction: f64,
    /// Warn when Lx or Ly is below this multiple of lambda_C.
    pub scale_separation: f64,
}

impl Default for ValidityThresholds {
    fn default() -> Self {
        Self { perturbative_fraction: 0.1, scale_separation: 10.0 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate(geometry: &Geometry, material: &Material) -> ValidationReport {
    validate_with(geometry, material, ValidityThresholds::default())
}

pub fn validate_with(
    geometry: &Geometry,
    material: &Material,
    thresholds: ValidityThresholds,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let g = geometry;

    for (name, value) in [("L", g.l), ("Lx", g.lx), ("Ly", g.ly), ("lambda_C", g.lambda_c)] {
        if value <= 0.0 || value.is_nan() {
            report.errors.push(format!("non-positive {name}: {value} m"));
        }
    }
    for (name, value) in [("a1", g.a1), ("a2", g.a2)] {
        if value < 0.0 || value.is_nan() {
            report.errors.push(format!("negative corrugation amplitude {name}: {value} m"));
        }
    }
    if !g.b.is_finite() || !g.theta.is_finite() {
        report.errors.push("non-finite b or theta".into());
    }
    if let Material::PlasmaModel { lambda_p } = material {
        if *lambda_p <= 0.0 || lambda_p.is_nan() {
            report.errors.push(format!("non-positive plasma wavelength: {lambda_p} m"));
        }
    }
    if !report.errors.is_empty() {
        return report;
    }

    let small = thresholds.perturbative_fraction * g.l.min(g.lambda_c);
    for (name, a) in [("a1", g.a1), ("a2", g.a2)] {
        if a > small {
            report.warnings.push(format!(
                "{name} = {a} m strains the perturbative regime: {name}/min(L, lambda_C) = {:.3} \
                 exceeds {}",
                a / g.l.min(g.lambda_c),
                thresholds.perturbative_fraction,
            ));
        }
    }
    let wide = thresholds.scale_separation * g.lambda_c;
    for (name, len) in [("Lx", g.lx), ("Ly", g.ly)] {
        if len < wide {
            report.warnings.push(format!(
                "{name} = {len} m spans only {:.2} corrugation periods; \
                 the large-plate limit assumes at least {}",
                len / g.lambda_c,
                thresholds.scale_separation,
            ));
        }
    }
    report
}

/// k = 2 pi / lambda_C (rad/m).
pub fn corrugation_wavenumber(lambda_c: f64) -> Result<f64, ModelError> {
    if lambda_c <= 0.0 || lambda_c.is_nan() {
        return Err(ModelError::NonPositivePeriod(lambda_c));
    }
    Ok(2.0 * std::f64::consts::PI / lambda_c)
}

/// sin(x)/x with the removable singularity handled by its series.
/// Evaluated at |x| so the evenness is exact, not up to libm rounding.
pub fn sinc(x: f64) -> f64 {
    let x = x.abs();
    if x < SINC_SERIES_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// d/dx [sin(x)/x] = (x cos x - sin x)/x^2, series near zero.
/// Odd by construction, matching the exact evenness of [`sinc`].
pub fn sinc_derivative(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SINC_SERIES_SWITCH {
        let x2 = ax * ax;
        -ax / 3.0 + ax * x2 / 30.0
    } else {
        (ax * ax.cos() - ax.sin()) / (ax * ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_geometry() -> Geometry {
        let a = (200e-18f64).sqrt();
        Geometry {
            l: 100e-9,
            lx: 24e-6,
            ly: 24e-6,
            a1: a,
            a2: a,
            lambda_c: 1.2e-6,
            b: 0.0,
            theta: 0.0,
        }
    }

    #[test]
    fn constants_are_codata() {
        assert_eq!(HBAR, 1.054571817e-34);
        assert_eq!(C, 299792458.0);
    }

    #[test]
    fn plasma_frequency_137nm() {
        let m = Material::PlasmaModel { lambda_p: 137e-9 };
        assert_relative_eq!(
            m.plasma_frequency().unwrap(),
            1.3749281513203309e16,
            max_relative = 1e-12
        );
        assert!(Material::PerfectMirror.plasma_frequency().is_none());
    }

    #[test]
    fn wavenumber_reference_values() {
        assert_relative_eq!(
            corrugation_wavenumber(1.2e-6).unwrap(),
            5.235987755982989e6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            corrugation_wavenumber(2.4e-6).unwrap(),
            2.6179938779914944e6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            corrugation_wavenumber(2.0 * std::f64::consts::PI).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert!(corrugation_wavenumber(0.0).is_err());
        assert!(corrugation_wavenumber(-1e-6).is_err());
    }

    #[test]
    fn wavenumber_involution() {
        for lambda in [1.2e-6, 137e-9, 3.7, 2.4e-6] {
            let k = corrugation_wavenumber(lambda).unwrap();
            let back = corrugation_wavenumber(k).unwrap();
            assert_relative_eq!(back, lambda, max_relative = 1e-15);
        }
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(std::f64::consts::PI).abs() < 1e-15);
        // global minimum, located independently at high precision
        assert_relative_eq!(sinc(4.493409457909064), -0.21723362821122166, max_relative = 1e-12);
    }

    #[test]
    fn sinc_derivative_values() {
        assert_eq!(sinc_derivative(0.0), 0.0);
        assert_relative_eq!(
            sinc_derivative(std::f64::consts::PI),
            -1.0 / std::f64::consts::PI,
            max_relative = 1e-14
        );
        // value at the minimizer of sinc' (high-precision oracle)
        assert_relative_eq!(
            sinc_derivative(2.0815759778181006),
            -0.4361818172714585,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            sinc_derivative(2.0816),
            -0.43618181720369677,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sinc_series_matches_direct_at_switch() {
        for x in [SINC_SERIES_SWITCH, -SINC_SERIES_SWITCH] {
            let x2 = x * x;
            let series = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
            assert!((series - x.sin() / x).abs() <= 1e-12);
            let dseries = -x / 3.0 + x * x2 / 30.0;
            assert!((dseries - (x * x.cos() - x.sin()) / x2).abs() <= 1e-12);
        }
    }

    #[test]
    fn sinc_parity_random_points() {
        // cheap xorshift so the point set is fixed
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..10_000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let x = (state as f64 / u64::MAX as f64 - 0.5) * 40.0;
            assert_eq!(sinc(-x), sinc(x));
            assert_eq!(sinc_derivative(-x), -sinc_derivative(x));
        }
    }

    #[test]
    fn sinc_derivative_extremum_from_search() {
        // golden-section minimization of sinc' on (0, pi); the torque
        // prefactor 0.109 of the maximum-torque formula is -min/4
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (1e-6, std::f64::consts::PI);
        let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
        let (mut fc, mut fd) = (sinc_derivative(c), sinc_derivative(d));
        while b - a > 1e-12 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = sinc_derivative(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = sinc_derivative(d);
            }
        }
        let x_star = 0.5 * (a + b);
        assert!((x_star - 2.0816).abs() < 1e-3);
        assert!((-sinc_derivative(x_star) - 0.4361818172714585).abs() < 1e-5);
        // localization is only good to ~sqrt(eps) because the function is
        // flat at the extremum; the value above is pinned much tighter
        assert_relative_eq!(x_star, 2.0815759778181006, max_relative = 1e-6);
    }

    #[test]
    fn validate_reference_config() {
        let report = validate(&reference_geometry(), &Material::PlasmaModel { lambda_p: 137e-9 });
        assert!(report.is_ok());
        // a1 = a2 = 14.14 nm exceeds 0.1 * min(L, lambda_C) = 10 nm, so the
        // perturbative warning fires for both amplitudes: next-order
        // corrections ~ a/L are expected in this regime.
        assert_eq!(report.warnings.len(), 2);
        assert!(report.warnings[0].contains("perturbative"));
    }

    #[test]
    fn validate_zero_amplitude_is_clean() {
        let mut g = reference_geometry();
        g.a1 = 0.0;
        g.a2 = 0.0;
        let report = validate(&g, &Material::PerfectMirror);
        assert!(report.is_ok());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn validate_rejects_nonpositive_separation() {
        let mut g = reference_geometry();
        g.l = 0.0;
        let report = validate(&g, &Material::PerfectMirror);
        assert!(!report.is_ok());
        assert!(report.errors[0].contains("non-positive L"));
    }

    #[test]
    fn validate_warns_on_narrow_plates() {
        let mut g = reference_geometry();
        g.a1 = 1e-9;
        g.a2 = 1e-9;
        g.lx = 2.0 * g.lambda_c;
        let report = validate(&g, &Material::PerfectMirror);
        assert!(report.is_ok());
        assert_eq!(report.warnings.len(), 1);
        assert!(report.warnings[0].contains("Lx"));
    }

    #[test]
    fn validate_rejects_bad_plasma_wavelength() {
        let report = validate(&reference_geometry(), &Material::PlasmaModel { lambda_p: -1.0 });
        assert!(!report.is_ok());
    }
}
