use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qcr_core::bnb::{self, BnbConfig};
use qcr_core::generate::random_qubo;
use qcr_core::{descend, trivial_shift, DescentParams, LmiSystem};

fn descent(c: &mut Criterion) {
    let mut group = c.benchmark_group("descend");
    group.sample_size(20);
    for n in [20, 50] {
        let p = random_qubo(n, 1.0, true, 8000 + n as u64);
        let sys = LmiSystem::new(p.clone());
        let start = sys.initial_feasible_point(&trivial_shift(&p, 0).unwrap()).unwrap();
        for (name, params) in [("node", DescentParams::node()), ("standalone", DescentParams::standalone())] {
            group.bench_with_input(BenchmarkId::new(name, n), &start, |b, s| {
                b.iter(|| descend(&sys, black_box(s.clone()), &params).unwrap().bound)
            });
        }
    }
    group.finish();
}

fn branch_and_bound(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for n in [12, 16, 20] {
        let p = random_qubo(n, 0.8, true, 9000 + n as u64);
        let cfg = BnbConfig::default();
        group.bench_with_input(BenchmarkId::new("warm", n), &p, |b, p| b.iter(|| bnb::solve(black_box(p), &cfg).unwrap().nodes));
    }
    group.finish();
}

criterion_group!(benches, descent, branch_and_bound);
criterion_main!(benches);
