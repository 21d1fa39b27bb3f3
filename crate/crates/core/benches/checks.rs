//! Compares a single-thread rayon pool against the default pool on the
//! heaviest checks. Build with `--no-default-features` to time the
//! sequential fallback instead; both pools then run the same code.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;

use hypercrystal::exec;
use hypercrystal::lattice::{check_ccr, poincare_basis, LatticeWindow};
use hypercrystal::symmetry::{residual, Checker};
use hypercrystal::vacua::{dalembertian_vacuum, DSector, MetricForm, VacuumTag};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let backend = if exec::is_parallel() { "rayon" } else { "sequential" };
    let default = ThreadPoolBuilder::new().build().expect("pool");
    let n = default.current_num_threads();
    vec![
        (format!("{backend}/1-thread"), ThreadPoolBuilder::new().num_threads(1).build().expect("pool")),
        (format!("{backend}/default-pool-{n}"), default),
    ]
}

fn bench_ccr(c: &mut Criterion) {
    let mut group = c.benchmark_group("ccr");
    let w = LatticeWindow::new(3).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "N=3"), |b| b.iter(|| pool.install(|| black_box(check_ccr(w).unwrap()))));
    }
    group.finish();
}

fn bench_lattice_residual(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice-residual");
    let g = MetricForm::null_form();
    let checker = Checker::new(&g, 1);
    let w = LatticeWindow::new(2).unwrap();
    let v = dalembertian_vacuum(&g, DSector::Lattice(w)).unwrap();
    let rotation = &poincare_basis(g.matrix())[4];
    let action = checker.affine_action(VacuumTag::Dalembertian, rotation, Some(w)).unwrap();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "dalembertian N=2"), |b| {
            b.iter(|| pool.install(|| black_box(residual(&v, &action).unwrap())))
        });
    }
    group.finish();
}

fn bench_intertwiners(c: &mut Criterion) {
    let mut group = c.benchmark_group("intertwiners");
    let g = MetricForm::null_form();
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "dirac parity"), |b| {
            b.iter(|| {
                // A fresh checker each time; the intertwiner cache would hide the work.
                let checker = Checker::new(&g, 1);
                pool.install(|| black_box(checker.check_parity(&hypercrystal::vacua::dirac_vacuum(checker.rep(), DSector::Abstract).unwrap()).unwrap()))
            })
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(10));
    targets = bench_ccr, bench_lattice_residual, bench_intertwiners
}
criterion_main!(benches);
