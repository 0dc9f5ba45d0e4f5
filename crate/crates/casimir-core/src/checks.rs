//! Built-in verification suite: the quantitative claims the toolkit is
//! expected to reproduce, bundled so an installation can be checked in
//! one call (the CLI `check` subcommand and the acceptance test both run
//! exactly this list). Every check recomputes its numbers from scratch
//! through the public API; nothing here is stubbed or cached across
//! processes.

use crate::lifshitz::{
    energy_first_derivative, energy_per_area, energy_second_derivative, perfect_mirror_d2,
    perfect_mirror_e_pp,
};
use crate::model::{sinc, sinc_derivative, Geometry, Material};
use crate::observables::{
    energy_correction, landscape_grid, lateral_force, optimal_wavenumber, torque, torque_max,
    torque_pfa_max,
};
use crate::quadrature::QuadratureSpec;
use crate::response::{default_spec, g_ratio, g_scattering, Method};
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        Self { name, passed: true, detail }
    }

    fn assemble(name: &'static str, failures: Vec<String>, detail: String) -> Self {
        if failures.is_empty() {
            Self::pass(name, detail)
        } else {
            Self { name, passed: false, detail: failures.join("; ") }
        }
    }
}

/// The checks in run order. Exposed as a list so callers can stream
/// outcomes one by one.
pub fn checks() -> Vec<fn() -> CheckOutcome> {
    vec![
        headline_torque,
        optimal_wavenumber_locations,
        pfa_error_at_peak,
        conductivity_error_at_peak,
        proximity_force_theorem,
        derived_profile_constants,
        lifshitz_oracle,
        landscape_geometry,
        property_suite,
    ]
}

pub fn run_all() -> Vec<CheckOutcome> {
    checks().into_iter().map(|check| check()).collect()
}

const GOLD: Material = Material::PlasmaModel { lambda_p: 137e-9 };

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

fn relative_deviation(value: f64, reference: f64) -> f64 {
    (value / reference - 1.0).abs()
}

/// tau/(Lx Ly) = 5.2e-7 N/m for the gold-like pair at L = 100 nm,
/// lambda_C = 1.2 um, a1 a2 = 200 nm^2, Ly = 24 um, within 5%.
fn headline_torque() -> CheckOutcome {
    let name = "headline-torque";
    let spec = default_spec();
    match torque_max(&reference_geometry(), &GOLD, Method::Scattering, &spec) {
        Ok(res) => {
            let dev = relative_deviation(res.torque_per_area, 5.2e-7);
            let detail = format!(
                "tau = {:.4e} N/m vs 5.2e-7 (deviation {:.2}%)",
                res.torque_per_area,
                100.0 * dev
            );
            CheckOutcome {
                name,
                passed: dev <= 0.05,
                detail,
            }
        }
        Err(err) => CheckOutcome { name, passed: false, detail: format!("failed: {err}") },
    }
}

/// argmax of k |G(k)| sits at k = 2.6 um^-1 (+/-4%) for L = 1 um and at
/// k L = 2.6 (+/-10%) for L = 200 nm.
fn optimal_wavenumber_locations() -> CheckOutcome {
    let name = "optimal-wavenumber";
    let spec = default_spec();
    let mut failures = Vec::new();
    let mut detail = String::new();
    match optimal_wavenumber(1e-6, &GOLD, &spec) {
        Ok(k_star) => {
            let dev = relative_deviation(k_star, 2.6e6);
            let _ = write!(detail, "k*(1 um) = {:.4e} rad/m ({:.2}% off 2.6e6)", k_star, 100.0 * dev);
            if dev > 0.04 {
                failures.push(format!("k* at L = 1 um off by {:.2}% > 4%", 100.0 * dev));
            }
        }
        Err(err) => failures.push(format!("search failed at L = 1 um: {err}")),
    }
    match optimal_wavenumber(200e-9, &GOLD, &spec) {
        Ok(k_star) => {
            let kl = k_star * 200e-9;
            let dev = relative_deviation(kl, 2.6);
            let _ = write!(detail, "; k*L(200 nm) = {:.4} ({:.2}% off 2.6)", kl, 100.0 * dev);
            if dev > 0.10 {
                failures.push(format!("k*L at L = 200 nm off by {:.2}% > 10%", 100.0 * dev));
            }
        }
        Err(err) => failures.push(format!("search failed at L = 200 nm: {err}")),
    }
    CheckOutcome::assemble(name, failures, detail)
}

/// G(0)/G(2.6 um^-1) = 2.03 +/- 0.05 at L = 1 um, plasma: the PFA
/// overestimates the peak torque by 103%.
fn pfa_error_at_peak() -> CheckOutcome {
    let name = "pfa-error-at-peak";
    let spec = default_spec();
    match g_ratio(2.6e6, 1e-6, &GOLD, &spec) {
        Ok(ratio) => {
            let inverse = 1.0 / ratio;
            CheckOutcome {
                name,
                passed: (inverse - 2.03).abs() <= 0.05,
                detail: format!("G(0)/G(2.6e6 rad/m) = {inverse:.4} vs 2.03 +/- 0.05"),
            }
        }
        Err(err) => CheckOutcome { name, passed: false, detail: format!("failed: {err}") },
    }
}

/// Ideal mirrors overestimate the plasma-metal torque by 16% +/- 2
/// percentage points near the peak at L = 1 um.
fn conductivity_error_at_peak() -> CheckOutcome {
    let name = "conductivity-error";
    let spec = default_spec();
    let result = (|| -> Result<f64, crate::response::ResponseError> {
        let plasma = g_scattering(2.6e6, 1e-6, &GOLD, &spec)?;
        let perfect = g_scattering(2.6e6, 1e-6, &Material::PerfectMirror, &spec)?;
        Ok(perfect.value / plasma.value)
    })();
    match result {
        Ok(ratio) => CheckOutcome {
            name,
            passed: (ratio - 1.16).abs() <= 0.02,
            detail: format!("perfect/plasma response ratio = {ratio:.4} vs 1.16 +/- 0.02"),
        },
        Err(err) => CheckOutcome { name, passed: false, detail: format!("failed: {err}") },
    }
}

/// G(k) stays within 1% of e''_PP(L) through k L = 0.05 for both
/// materials and L in {100 nm, 1 um}; the deviation grows with k L, so
/// the boundary is the worst case.
fn proximity_force_theorem() -> CheckOutcome {
    let name = "proximity-force-theorem";
    let spec = default_spec();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for material in [GOLD, Material::PerfectMirror] {
        for l in [100e-9, 1e-6] {
            let k = 0.05 / l;
            let pair = g_scattering(k, l, &material, &spec).and_then(|g| {
                Ok((g.value, energy_second_derivative(l, &material, &spec)?))
            });
            match pair {
                Ok((g, d2)) => {
                    let dev = relative_deviation(g, d2);
                    worst = worst.max(dev);
                    if dev > 0.01 {
                        failures.push(format!(
                            "G/e'' off by {:.3}% at kL = 0.05, L = {l:e}, {material:?}",
                            100.0 * dev
                        ));
                    }
                }
                Err(err) => failures.push(format!("failed: {err}")),
            }
        }
    }
    let detail =
        format!("max |G(0.05/L)/e''_PP - 1| = {:.3}% over 4 configurations", 100.0 * worst);
    CheckOutcome::assemble(name, failures, detail)
}

/// The 0.109 prefactor, the 0.66 lambda_C/Ly torque angle and the 1.43
/// lambda_C/Ly tilted-minimum angle all re-emerge from extremizing the
/// sinc profile numerically.
fn derived_profile_constants() -> CheckOutcome {
    let name = "derived-constants";
    // coarse scan + ternary refinement, independent of the library search
    let refine = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| {
        let n = 2000;
        let step = (hi - lo) / n as f64;
        let mut best = (lo, f(lo));
        for i in 1..=n {
            let x = lo + i as f64 * step;
            if f(x) > best.1 {
                best = (x, f(x));
            }
        }
        lo = best.0 - step;
        hi = best.0 + step;
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if f(m1) < f(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        0.5 * (lo + hi)
    };
    let u_torque = refine(&|u| -sinc_derivative(u), 1e-6, PI);
    let u_tilt = refine(&|u| -sinc(u), PI, 2.0 * PI);
    let prefactor = -sinc_derivative(u_torque) / 4.0;
    let theta_star = u_torque / PI; // in units of lambda_C/Ly
    let theta_tilt = u_tilt / PI;
    let mut failures = Vec::new();
    if (prefactor - 0.109).abs() > 0.001 {
        failures.push(format!("prefactor {prefactor:.5} not 0.109 +/- 0.001"));
    }
    if relative_deviation(theta_star, 0.66) > 0.01 {
        failures.push(format!("theta* = {theta_star:.5} lambda_C/Ly not 0.66 +/- 1%"));
    }
    if relative_deviation(theta_tilt, 1.43) > 0.01 {
        failures.push(format!("tilt angle {theta_tilt:.5} lambda_C/Ly not 1.43 +/- 1%"));
    }
    let detail = format!(
        "prefactor {prefactor:.6}, theta* = {theta_star:.6} lambda_C/Ly, tilt = {theta_tilt:.6} lambda_C/Ly"
    );
    CheckOutcome::assemble(name, failures, detail)
}

/// The integral path reproduces the perfect-mirror closed forms at three
/// separations to 1e-4 and converges to them in the lambda_P -> 0 limit
/// of the plasma model (energy within 0.1% at lambda_P = 1e-3 L).
fn lifshitz_oracle() -> CheckOutcome {
    let name = "lifshitz-oracle";
    let spec = default_spec();
    let mut failures = Vec::new();
    let mut worst_e: f64 = 0.0;
    let mut worst_d2: f64 = 0.0;
    for l in [0.1e-6, 1e-6, 10e-6] {
        match energy_per_area(l, &Material::PerfectMirror, &spec) {
            Ok(res) => {
                let dev_e = relative_deviation(res.e_pp, perfect_mirror_e_pp(l));
                let dev_d2 = relative_deviation(res.d2, perfect_mirror_d2(l));
                worst_e = worst_e.max(dev_e);
                worst_d2 = worst_d2.max(dev_d2);
                if dev_e > 1e-4 {
                    failures.push(format!("e_PP off by {dev_e:.2e} at L = {l:e}"));
                }
                if dev_d2 > 1e-4 {
                    failures.push(format!("e''_PP off by {dev_d2:.2e} at L = {l:e}"));
                }
            }
            Err(err) => failures.push(format!("failed at L = {l:e}: {err}")),
        }
    }
    let l = 1e-6;
    let nearly_perfect = Material::PlasmaModel { lambda_p: 1e-3 * l };
    let mut limit_dev = f64::NAN;
    match energy_per_area(l, &nearly_perfect, &spec) {
        Ok(res) => {
            limit_dev = relative_deviation(res.e_pp, perfect_mirror_e_pp(l));
            if limit_dev > 1e-3 {
                failures.push(format!(
                    "plasma energy at lambda_P = 1e-3 L off the perfect limit by {:.3}%",
                    100.0 * limit_dev
                ));
            }
        }
        Err(err) => failures.push(format!("plasma limit failed: {err}")),
    }
    let detail = format!(
        "closed-form deviation: e_PP {:.1e}, e'' {:.1e}; plasma->perfect energy gap {:.3}%",
        worst_e,
        worst_d2,
        100.0 * limit_dev
    );
    CheckOutcome::assemble(name, failures, detail)
}

/// Landscape grid: argmin on the theta = 0 line at a multiple of
/// lambda_C, tilted local minima at the +/-1.43 lambda_C/Ly nodes of the
/// b = lambda_C/2 row, and exact evenness in theta.
fn landscape_geometry() -> CheckOutcome {
    let name = "landscape-geometry";
    let spec = default_spec();
    let g = reference_geometry();
    let steps = 17;
    let grid = match landscape_grid(&g, &GOLD, Method::Pfa, steps, steps, &spec) {
        Ok(grid) => grid,
        Err(err) => {
            return CheckOutcome { name, passed: false, detail: format!("failed: {err}") }
        }
    };
    let mut failures = Vec::new();
    let min = grid
        .iter()
        .min_by(|p, q| p.delta_e_per_area.total_cmp(&q.delta_e_per_area))
        .unwrap();
    let b_cell = 2.0 * g.lambda_c / (steps - 1) as f64;
    let off = (min.b / g.lambda_c - (min.b / g.lambda_c).round()).abs() * g.lambda_c;
    if min.theta != 0.0 || off > b_cell {
        failures.push(format!("argmin at (b = {:.3e}, theta = {:.3e})", min.b, min.theta));
    }
    // b = lambda_C/2 row sits at index 4 (cell lambda_C/8); the 1.43
    // nodes are 4 steps either side of the center
    let row = &grid[4 * steps..5 * steps];
    for node in [4usize, 12] {
        let here = row[node].delta_e_per_area;
        if !(here < row[node - 1].delta_e_per_area && here < row[node + 1].delta_e_per_area) {
            failures.push(format!("no tilted minimum at theta = {:.3e}", row[node].theta));
        }
    }
    let mut symmetric = true;
    for row in grid.chunks(steps) {
        for j in 0..steps {
            symmetric &= row[j].delta_e_per_area == row[steps - 1 - j].delta_e_per_area
                && row[j].theta == -row[steps - 1 - j].theta;
        }
    }
    if !symmetric {
        failures.push("grid not exactly even in theta".into());
    }
    let detail = format!(
        "argmin at (b/lambda_C = {:.3}, theta = {:.1e}); tilted minima and exact theta-evenness verified on {steps}x{steps}",
        min.b / g.lambda_c,
        min.theta
    );
    CheckOutcome::assemble(name, failures, detail)
}

/// Sign, monotonicity, linearity and derivative cross-checks: G < 0 on a
/// (k, L, material) sample; G(k)/G(0) strictly decreasing; PFA torque
/// exactly linear in k; analytic torque and lateral force against finite
/// differences of the energy to 1e-6; e' and e'' against finite
/// differences of e_PP to 1e-3.
fn property_suite() -> CheckOutcome {
    let name = "property-suite";
    let spec = default_spec();
    let mut failures = Vec::new();

    for material in [GOLD, Material::PerfectMirror] {
        for (k, l) in [(2.6e6, 1e-6), (1e7, 1e-6), (5.235987755982989e6, 100e-9)] {
            match g_scattering(k, l, &material, &spec) {
                Ok(s) if s.value < 0.0 => {}
                Ok(s) => failures.push(format!(
                    "G = {:e} not negative at k = {k:e}, L = {l:e}, {material:?}",
                    s.value
                )),
                Err(err) => failures.push(format!("G failed at k = {k:e}: {err}")),
            }
        }
    }

    let mut previous = f64::INFINITY;
    for k in [0.5e6, 1e6, 2.6e6, 5e6, 1e7] {
        match g_ratio(k, 1e-6, &GOLD, &spec) {
            Ok(r) => {
                if !(r < previous && r > 0.0) {
                    failures.push(format!("G(k)/G(0) not strictly decreasing at k = {k:e}"));
                }
                previous = r;
            }
            Err(err) => failures.push(format!("ratio failed at k = {k:e}: {err}")),
        }
    }

    let g = reference_geometry();
    let linear = (|| -> Result<bool, crate::observables::ObservablesError> {
        let base = torque_pfa_max(&g, &GOLD, &spec)?;
        let mut halved = g;
        halved.lambda_c = 0.5 * g.lambda_c;
        let doubled_k = torque_pfa_max(&halved, &GOLD, &spec)?;
        Ok(doubled_k.torque_per_area == 2.0 * base.torque_per_area)
    })();
    match linear {
        Ok(true) => {}
        Ok(false) => failures.push("PFA torque not exactly linear in k".into()),
        Err(err) => failures.push(format!("PFA linearity check failed: {err}")),
    }

    let unit = g.lambda_c / g.ly;
    for (b_frac, theta_frac) in [(0.15, 0.45), (0.4, -0.8)] {
        let mut p = g;
        p.b = b_frac * g.lambda_c;
        p.theta = theta_frac * unit;
        let energy_at = |b: f64, theta: f64| {
            let mut q = p;
            q.b = b;
            q.theta = theta;
            energy_correction(&q, &GOLD, Method::Pfa, &spec).unwrap()
        };
        let h_theta = 1e-4 * unit;
        let h_b = 1e-4 * g.lambda_c;
        let de_dtheta =
            (energy_at(p.b, p.theta + h_theta) - energy_at(p.b, p.theta - h_theta))
                / (2.0 * h_theta);
        let tau = torque(&p, &GOLD, Method::Pfa, &spec).unwrap();
        if relative_deviation(tau, p.theta.signum() * de_dtheta) > 1e-6 {
            failures.push(format!("torque vs finite difference off at theta = {theta_frac} unit"));
        }
        let de_db =
            (energy_at(p.b + h_b, p.theta) - energy_at(p.b - h_b, p.theta)) / (2.0 * h_b);
        let force = lateral_force(&p, &GOLD, Method::Pfa, &spec).unwrap();
        if relative_deviation(force, -de_db) > 1e-6 {
            failures.push(format!("lateral force vs finite difference off at b = {b_frac} lambda_C"));
        }
    }

    let l = 1e-6;
    let h = 5e-3 * l;
    let tight = QuadratureSpec { rel_tol: 1e-9, ..spec };
    let fd = (|| -> Result<(f64, f64), crate::lifshitz::LifshitzError> {
        let e = |x: f64| energy_per_area(x, &GOLD, &tight).map(|r| r.e_pp);
        let d1 = energy_first_derivative(l, &GOLD, &tight)?;
        let d1_fd = (e(l + h)? - e(l - h)?) / (2.0 * h);
        let d2 = energy_second_derivative(l, &GOLD, &tight)?;
        let d2_fd = (energy_first_derivative(l + h, &GOLD, &tight)?
            - energy_first_derivative(l - h, &GOLD, &tight)?)
            / (2.0 * h);
        Ok((relative_deviation(d1, d1_fd), relative_deviation(d2, d2_fd)))
    })();
    match fd {
        Ok((dev1, dev2)) => {
            if dev1 > 1e-3 {
                failures.push(format!("e' vs finite difference off by {dev1:.2e}"));
            }
            if dev2 > 1e-3 {
                failures.push(format!("e'' vs finite difference off by {dev2:.2e}"));
            }
        }
        Err(err) => failures.push(format!("derivative cross-check failed: {err}")),
    }

    CheckOutcome::assemble(
        name,
        failures,
        "signs, ratio monotonicity, exact PFA linearity and derivative cross-checks hold".into(),
    )
}
