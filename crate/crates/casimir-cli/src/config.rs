//! Flat key-value run configuration: one `key = value` per line, `#`
//! comments, units mandatory on every dimensioned value. Lengths take
//! nm/um/m (areas nm2/um2/m2), angles take rad/deg; everything is
//! normalized to SI on parse. Errors carry the offending line.

use casimir_core::model::{validate, Geometry, Material};
use casimir_core::quadrature::QuadratureSpec;
use casimir_core::response::{default_spec, Method};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    NotAssignment { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: {key} = {value}: {reason}")]
    BadValue { line: usize, key: String, value: String, reason: String },
    #[error("missing required keys: {0}")]
    MissingKeys(String),
    #[error("line {line}: lambda_P meaningless for perfect mirrors")]
    PlasmaWavelengthForPerfect { line: usize },
    #[error("specify either a1 + a2 or a1a2, not both (lines {0} and {1})")]
    AmplitudeConflict(usize, usize),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub material: Material,
    pub method: Method,
    pub quadrature: QuadratureSpec,
    pub output: OutputFormat,
    /// None writes to standard output.
    pub output_path: Option<String>,
    /// Regime warnings from geometry validation, for the error stream.
    pub warnings: Vec<String>,
}

const KEYS: [&str; 15] = [
    "L",
    "Lx",
    "Ly",
    "a1",
    "a2",
    "a1a2",
    "lambda_C",
    "b",
    "theta",
    "material",
    "lambda_P",
    "method",
    "rel_tol",
    "output",
    "output_path",
];

enum Scale {
    /// Decimal shift by 10^n, applied before the one string-to-float
    /// conversion so `1000nm` and `1e-6m` parse to the identical double.
    Pow(i64),
    Factor(f64),
}

/// Scale a decimal literal by 10^shift without a second rounding step.
fn shifted(number: &str, shift: i64) -> Option<f64> {
    number.parse::<f64>().ok()?;
    let (mantissa, exponent) = match number.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (number, 0),
    };
    format!("{mantissa}e{}", exponent + shift).parse().ok()
}

/// Trailing-unit number, e.g. `100nm`, `1.2 um`, `200nm2`, `0.1deg`.
/// Suffixes are tried longest first so `nm` wins over `m`.
fn with_unit(value: &str, units: &[(&str, Scale)], kind: &str) -> Result<f64, String> {
    for (suffix, scale) in units {
        if let Some(prefix) = value.strip_suffix(suffix) {
            let number = prefix.trim_end();
            let not_a_number = || format!("`{number}` is not a number");
            let parsed = match scale {
                Scale::Pow(shift) => shifted(number, *shift).ok_or_else(not_a_number)?,
                Scale::Factor(factor) => {
                    number.parse::<f64>().map_err(|_| not_a_number())? * factor
                }
            };
            if !parsed.is_finite() {
                return Err("value must be finite".into());
            }
            return Ok(parsed);
        }
    }
    let names: Vec<&str> = units.iter().map(|(s, _)| *s).collect();
    Err(format!("{kind} needs a unit suffix ({})", names.join(", ")))
}

fn length(value: &str) -> Result<f64, String> {
    let units = [("nm", Scale::Pow(-9)), ("um", Scale::Pow(-6)), ("m", Scale::Pow(0))];
    with_unit(value, &units, "a length")
}

fn area(value: &str) -> Result<f64, String> {
    let units = [("nm2", Scale::Pow(-18)), ("um2", Scale::Pow(-12)), ("m2", Scale::Pow(0))];
    with_unit(value, &units, "an area")
}

fn angle(value: &str) -> Result<f64, String> {
    let units =
        [("rad", Scale::Factor(1.0)), ("deg", Scale::Factor(std::f64::consts::PI / 180.0))];
    with_unit(value, &units, "an angle")
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut seen: HashMap<&str, (usize, String)> = HashMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::NotAssignment { line, text: content.into() });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(&canonical) = KEYS.iter().find(|&&k| k == key) else {
            return Err(ConfigError::UnknownKey { line, key: key.into() });
        };
        if value.is_empty() {
            return Err(ConfigError::BadValue {
                line,
                key: key.into(),
                value: value.into(),
                reason: "empty value".into(),
            });
        }
        if seen.insert(canonical, (line, value.into())).is_some() {
            return Err(ConfigError::DuplicateKey { line, key: key.into() });
        }
    }

    let bad = |key: &str, reason: String| {
        let (line, value) = &seen[key];
        ConfigError::BadValue { line: *line, key: key.into(), value: value.clone(), reason }
    };
    let get_length = |key: &str| -> Result<Option<f64>, ConfigError> {
        seen.get(key)
            .map(|(_, v)| length(v).map_err(|r| bad(key, r)))
            .transpose()
    };

    // the amplitude pair and the material are cross-validated first so
    // missing-key reporting can stay a single aggregated error
    let mut missing: Vec<&str> = Vec::new();
    for key in ["L", "Lx", "Ly", "lambda_C", "material"] {
        if !seen.contains_key(key) {
            missing.push(key);
        }
    }
    let has_product = seen.contains_key("a1a2");
    let has_parts = seen.contains_key("a1") || seen.contains_key("a2");
    if has_product && has_parts {
        let product_line = seen["a1a2"].0;
        let part_line = seen.get("a1").or_else(|| seen.get("a2")).unwrap().0;
        return Err(ConfigError::AmplitudeConflict(part_line, product_line));
    }
    if !has_product {
        for key in ["a1", "a2"] {
            if !seen.contains_key(key) {
                missing.push(key);
            }
        }
    }
    let material_name = seen.get("material").map(|(_, v)| v.as_str());
    if material_name == Some("plasma") && !seen.contains_key("lambda_P") {
        missing.push("lambda_P");
    }
    if !missing.is_empty() {
        return Err(ConfigError::MissingKeys(missing.join(", ")));
    }

    let material = match material_name.unwrap() {
        "plasma" => Material::PlasmaModel { lambda_p: get_length("lambda_P")?.unwrap() },
        "perfect" => {
            if let Some((line, _)) = seen.get("lambda_P") {
                return Err(ConfigError::PlasmaWavelengthForPerfect { line: *line });
            }
            Material::PerfectMirror
        }
        other => {
            return Err(bad("material", format!("`{other}` is not `plasma` or `perfect`")))
        }
    };

    let (a1, a2) = if has_product {
        let (_, value) = &seen["a1a2"];
        let product = area(value).map_err(|r| bad("a1a2", r))?;
        if product < 0.0 || product.is_nan() {
            return Err(bad("a1a2", "amplitude product must be nonnegative".into()));
        }
        let amplitude = product.sqrt();
        (amplitude, amplitude)
    } else {
        (get_length("a1")?.unwrap(), get_length("a2")?.unwrap())
    };

    let geometry = Geometry {
        l: get_length("L")?.unwrap(),
        lx: get_length("Lx")?.unwrap(),
        ly: get_length("Ly")?.unwrap(),
        a1,
        a2,
        lambda_c: get_length("lambda_C")?.unwrap(),
        b: get_length("b")?.unwrap_or(0.0),
        theta: seen
            .get("theta")
            .map(|(_, v)| angle(v).map_err(|r| bad("theta", r)))
            .transpose()?
            .unwrap_or(0.0),
    };

    let method = match seen.get("method").map(|(_, v)| v.as_str()).unwrap_or("scattering") {
        "scattering" => Method::Scattering,
        "pfa" => Method::Pfa,
        "perfect" => Method::PerfectScattering,
        other => {
            return Err(bad("method", format!("`{other}` is not scattering, pfa or perfect")))
        }
    };

    let mut quadrature = default_spec();
    if let Some((_, value)) = seen.get("rel_tol") {
        let rel_tol: f64 = value
            .parse()
            .map_err(|_| bad("rel_tol", format!("`{value}` is not a number")))?;
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(bad("rel_tol", "must be positive and finite".into()));
        }
        quadrature.rel_tol = rel_tol;
    }

    let output = match seen.get("output").map(|(_, v)| v.as_str()).unwrap_or("csv") {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(bad("output", format!("`{other}` is not csv or json"))),
    };
    let output_path = seen
        .get("output_path")
        .map(|(_, v)| v.clone())
        .filter(|path| path != "-");

    let report = validate(&geometry, &material);
    if !report.is_ok() {
        return Err(ConfigError::Invalid(report.errors.join("; ")));
    }

    Ok(RunConfig {
        geometry,
        material,
        method,
        quadrature,
        output,
        output_path,
        warnings: report.warnings,
    })
}

/// The headline experimental configuration, used by tests.
#[cfg(test)]
pub fn reference_text() -> &'static str {
    "\
# reference configuration
L = 100nm
Lx = 24um
Ly = 24um
a1a2 = 200nm2
lambda_C = 1.2um
material = plasma
lambda_P = 137nm
"
}
