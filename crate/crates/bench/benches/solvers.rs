use ado_bench::{slab, square};
use ado_core::nodal::{assemble_and_solve, build_all_bases, LinearSolver};
use ado_core::oracle::{dd2d, OracleConfig};
use ado_core::slab::solve;
use ado_core::Scheme;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("quadrature");
    for scheme in [Scheme::LevelSymmetric, Scheme::LegendreChebyshevQuad, Scheme::LegendreChebyshevTri] {
        g.bench_with_input(BenchmarkId::new(scheme.name(), 16), &scheme, |b, &s| {
            b.iter(|| s.build(black_box(16)).unwrap())
        });
    }
    g.finish();
}

fn slab_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("slab");
    for n in [10usize, 40, 100] {
        let p = slab(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| b.iter(|| solve(black_box(p)).unwrap()));
    }
    g.finish();
}

fn nodal(c: &mut Criterion) {
    let mut g = c.benchmark_group("nodal");
    g.sample_size(10);
    for n in [2usize, 8, 16] {
        let p = square(n, 8);
        g.bench_with_input(BenchmarkId::new("bases", n), &p, |b, p| {
            b.iter(|| build_all_bases(black_box(p)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("direct", n), &p, |b, p| {
            b.iter(|| assemble_and_solve(black_box(p)).unwrap())
        });
        let mut it = p.clone();
        it.solver = LinearSolver::Gmres {
            tolerance: 1e-12,
            restart: 60,
            max_iterations: 2000,
        };
        g.bench_with_input(BenchmarkId::new("gmres", n), &it, |b, p| {
            b.iter(|| assemble_and_solve(black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let p = square(2, 4);
    let cfg = OracleConfig::new(64, 1e-10, 10_000).unwrap();
    g.bench_function("dd2d_64", |b| b.iter(|| dd2d(black_box(&p), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, quadrature, slab_solve, nodal, oracle);
criterion_main!(benches);
