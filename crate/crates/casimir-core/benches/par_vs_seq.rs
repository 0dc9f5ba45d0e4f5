use casimir_core::exec;
use casimir_core::model::Material;
use casimir_core::quadrature::{integrate_plane_polar, QuadratureSpec};
use casimir_core::response::{clear_cache, g_scattering};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn plane_integral(c: &mut Criterion) {
    let spec = QuadratureSpec::with_rel_tol(1e-9);
    let f = |r: f64, phi: f64| (-r * (1.0 + 0.5 * phi.cos())).exp() / (1.0 + r * r);

    let mut group = c.benchmark_group("plane_integral");
    for &sequential in &[false, true] {
        let label = if sequential { "sequential" } else { "parallel" };
        group.bench_with_input(BenchmarkId::from_parameter(label), &sequential, |b, &seq| {
            exec::force_sequential(seq);
            b.iter(|| integrate_plane_polar(f, &spec).unwrap().value);
            exec::force_sequential(false);
        });
    }
    group.finish();
}

fn response_function(c: &mut Criterion) {
    // the production workload: one G(k) sample at the torque peak; the
    // cache is dropped every iteration so the integrals really run
    let gold = Material::PlasmaModel { lambda_p: 137e-9 };
    let spec = QuadratureSpec { rel_tol: 1e-4, ..QuadratureSpec::default() };

    let mut group = c.benchmark_group("response_function");
    group.sample_size(10);
    for &sequential in &[false, true] {
        let label = if sequential { "sequential" } else { "parallel" };
        group.bench_with_input(BenchmarkId::from_parameter(label), &sequential, |b, &seq| {
            exec::force_sequential(seq);
            b.iter(|| {
                clear_cache();
                g_scattering(2.6e6, 1e-6, &gold, &spec).unwrap().value
            });
            exec::force_sequential(false);
        });
    }
    group.finish();
}

criterion_group!(benches, plane_integral, response_function);
criterion_main!(benches);
