//! One table builder per subcommand, mapping the parsed config onto the
//! core operations. Columns are stable: scripts key on the headers.

use crate::config::RunConfig;
use crate::output::{Cell, Row, Table};
use casimir_core::lifshitz::{energy_per_area, LifshitzError};
use casimir_core::model::{corrugation_wavenumber, Material, ModelError};
use casimir_core::observables::{self, ObservablesError};
use casimir_core::response::{g_sample, Method, ResponseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
    #[error(transparent)]
    Response(#[from] ResponseError),
    #[error(transparent)]
    Observables(#[from] ObservablesError),
    /// A flag or config combination the subcommand cannot serve; main
    /// reports these as usage errors.
    #[error("{0}")]
    Unsupported(String),
}

fn wavenumber(config: &RunConfig) -> Result<f64, CommandError> {
    Ok(corrugation_wavenumber(config.geometry.lambda_c)?)
}

/// Second-order energy correction per area at the configured offsets.
pub fn energy(config: &RunConfig) -> Result<Table, CommandError> {
    let g = &config.geometry;
    let value =
        observables::energy_correction(g, &config.material, config.method, &config.quadrature)?;
    Ok(Table::single(
        &["k_rad_per_m", "b_m", "theta_rad", "method", "delta_e_J_per_m2"],
        vec![
            Cell::Num(wavenumber(config)?),
            Cell::Num(g.b),
            Cell::Num(g.theta),
            Cell::Text(config.method.to_string()),
            Cell::Num(value),
        ],
    ))
}

/// Parallel-plane energy per area and its first two L-derivatives.
pub fn epp(config: &RunConfig) -> Result<Table, CommandError> {
    let result = energy_per_area(config.geometry.l, &config.material, &config.quadrature)?;
    Ok(Table::single(
        &["L_m", "e_pp_J_per_m2", "d1_J_per_m3", "d2_J_per_m4"],
        vec![
            Cell::Num(result.l),
            Cell::Num(result.e_pp),
            Cell::Num(result.d1),
            Cell::Num(result.d2),
        ],
    ))
}

/// Response function at the configured corrugation wavenumber.
pub fn gk(config: &RunConfig) -> Result<Table, CommandError> {
    let k = wavenumber(config)?;
    let sample =
        g_sample(config.method, k, config.geometry.l, &config.material, &config.quadrature)?;
    Ok(Table::single(
        &["k_rad_per_m", "L_m", "method", "g_J_per_m4", "error_estimate_J_per_m4"],
        vec![
            Cell::Num(sample.k),
            Cell::Num(sample.l),
            Cell::Text(sample.method.to_string()),
            Cell::Num(sample.value),
            Cell::Num(sample.error_estimate),
        ],
    ))
}

/// Restoring torque per area at the configured (b, theta).
pub fn torque(config: &RunConfig) -> Result<Table, CommandError> {
    let g = &config.geometry;
    let tau = observables::torque(g, &config.material, config.method, &config.quadrature)?;
    Ok(Table::single(
        &["b_m", "theta_rad", "method", "tau_N_per_m"],
        vec![
            Cell::Num(g.b),
            Cell::Num(g.theta),
            Cell::Text(config.method.to_string()),
            Cell::Num(tau),
        ],
    ))
}

/// Peak restoring torque over theta (b and theta in the config ignored).
pub fn torque_max(config: &RunConfig) -> Result<Table, CommandError> {
    let result = observables::torque_max(
        &config.geometry,
        &config.material,
        config.method,
        &config.quadrature,
    )?;
    Ok(Table::single(
        &["method", "theta_star_rad", "tau_max_N_per_m"],
        vec![
            Cell::Text(result.method.to_string()),
            Cell::Num(result.theta_at),
            Cell::Num(result.torque_per_area),
        ],
    ))
}

/// Energy landscape over (b, theta); one row per grid point.
pub fn landscape(
    config: &RunConfig,
    b_steps: usize,
    theta_steps: usize,
) -> Result<Table, CommandError> {
    let points = observables::landscape_grid(
        &config.geometry,
        &config.material,
        config.method,
        b_steps,
        theta_steps,
        &config.quadrature,
    )
    .map_err(|err| match err {
        ObservablesError::TooFewSteps(_) => CommandError::Unsupported(err.to_string()),
        other => other.into(),
    })?;
    let rows = points
        .into_iter()
        .map(|p| Row::Cells(vec![Cell::Num(p.b), Cell::Num(p.theta), Cell::Num(p.delta_e_per_area)]))
        .collect();
    Ok(Table { columns: &["b_m", "theta_rad", "delta_e_J_per_m2"], rows })
}

/// Peak torque for all three methods across a log-spaced wavenumber grid.
pub fn sweep_k(
    config: &RunConfig,
    k_min: Option<f64>,
    k_max: Option<f64>,
    points: usize,
) -> Result<Table, CommandError> {
    let g = &config.geometry;
    let lo = k_min.unwrap_or(0.2 / g.l);
    let hi = k_max.unwrap_or(20.0 / g.l);
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(CommandError::Unsupported(format!(
            "need 0 < k-min < k-max, got {lo} and {hi}"
        )));
    }
    if points < 2 {
        return Err(CommandError::Unsupported(format!(
            "need at least 2 sweep points, got {points}"
        )));
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..points)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (points - 1) as f64).exp())
        .collect();
    let rows = observables::sweep_k(
        g.l,
        &config.material,
        &grid,
        g.a1 * g.a2,
        g.ly,
        &config.quadrature,
    )?;
    let rows = rows
        .into_iter()
        .map(|row| match row.outcome {
            Ok(p) => Row::Cells(vec![
                Cell::Num(row.k),
                Cell::Num(p.tau_scattering),
                Cell::Num(p.tau_pfa),
                Cell::Num(p.tau_perfect),
                Cell::Num(p.theta_star),
            ]),
            Err(err) => Row::Error { k: row.k, message: err.to_string() },
        })
        .collect();
    Ok(Table {
        columns: &["k_rad_per_m", "tau_scattering", "tau_pfa", "tau_perfect", "theta_star"],
        rows,
    })
}

/// Wavenumber maximizing k|G(k)| at the configured separation.
pub fn optimize(config: &RunConfig) -> Result<Table, CommandError> {
    let material = match config.method {
        Method::Scattering => config.material,
        Method::PerfectScattering => Material::PerfectMirror,
        Method::Pfa => {
            return Err(CommandError::Unsupported(
                "optimize needs a scattering method: under pfa, k|G(k)| grows without bound"
                    .into(),
            ))
        }
    };
    let k_star =
        observables::optimal_wavenumber(config.geometry.l, &material, &config.quadrature)?;
    Ok(Table::single(
        &["L_m", "k_star_rad_per_m", "lambda_c_star_m"],
        vec![
            Cell::Num(config.geometry.l),
            Cell::Num(k_star),
            Cell::Num(std::f64::consts::TAU / k_star),
        ],
    ))
}

/// Scattering, PFA and perfect-mirror response side by side with ratios.
pub fn compare(config: &RunConfig) -> Result<Table, CommandError> {
    let k = wavenumber(config)?;
    let (l, material, spec) = (config.geometry.l, &config.material, &config.quadrature);
    let scattering = g_sample(Method::Scattering, k, l, material, spec)?;
    let pfa = g_sample(Method::Pfa, k, l, material, spec)?;
    let perfect = g_sample(Method::PerfectScattering, k, l, material, spec)?;
    Ok(Table::single(
        &[
            "k_rad_per_m",
            "g_scattering_J_per_m4",
            "g_pfa_J_per_m4",
            "g_perfect_J_per_m4",
            "pfa_over_scattering",
            "perfect_over_scattering",
        ],
        vec![
            Cell::Num(k),
            Cell::Num(scattering.value),
            Cell::Num(pfa.value),
            Cell::Num(perfect.value),
            Cell::Num(pfa.value / scattering.value),
            Cell::Num(perfect.value / scattering.value),
        ],
    ))
}
