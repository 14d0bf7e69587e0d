use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qcr_core::generate::random_qubo;
use qcr_core::linalg::{cholesky, max_eig, LanczosOptions};
use qcr_core::{trivial_shift, DVector, LmiSystem};

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracles");
    for n in [20, 50, 100] {
        let p = random_qubo(n, 1.0, true, n as u64);
        let sys = LmiSystem::new(p.clone());
        let start = sys.initial_feasible_point(&trivial_shift(&p, 0).unwrap()).unwrap();
        let cache = sys.cache(start.clone()).unwrap();
        let g = cache.grad_dir().unwrap();
        let d = -(&g / g.norm());

        group.bench_with_input(BenchmarkId::new("factor_and_eval", n), &start, |b, s| {
            b.iter(|| sys.cache(black_box(s.clone())).unwrap().eval_f().unwrap())
        });
        group.bench_with_input(BenchmarkId::new("grad_dir", n), &cache, |b, c| b.iter(|| c.grad_dir().unwrap()));
        group.bench_with_input(BenchmarkId::new("boundary_ray", n), &d, |b, d| {
            b.iter(|| cache.boundary_ray(black_box(d)).unwrap())
        });
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    for m in [51, 101, 201] {
        let p = random_qubo(m, 1.0, false, 7);
        let a = p.q() + qcr_core::DMatrix::identity(m, m) * (m as f64);
        group.bench_with_input(BenchmarkId::new("cholesky", m), &a, |b, a| b.iter(|| cholesky(black_box(a)).unwrap()));
        let opts = LanczosOptions::default();
        group.bench_with_input(BenchmarkId::new("max_eig", m), p.q(), |b, q| {
            b.iter(|| max_eig(black_box(q), &opts).unwrap())
        });
        let f = cholesky(&a).unwrap();
        let rhs = DVector::from_element(m, 1.0);
        group.bench_with_input(BenchmarkId::new("solve", m), &rhs, |b, r| b.iter(|| f.solve(black_box(r))));
    }
    group.finish();
}

criterion_group!(benches, oracles, kernels);
criterion_main!(benches);
