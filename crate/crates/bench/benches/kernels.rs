use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use gq_core::dynamical::{build_gutt_twistor, check_equivalence, random_invariant_twists};
use gq_core::groupoid::check_twistor;
use gq_core::rational::int;
use gq_core::{fixtures, Context, MultiIndex};

fn fresh(name: &str, order: u32) -> Context {
    Context::exact(fixtures::algebra(name).expect("bundled"), order).expect("context")
}

fn bench_pbw_star(c: &mut Criterion) {
    let mut group = c.benchmark_group("pbw_star");
    for name in ["axb", "sl2"] {
        group.bench_function(format!("{name}_deg3_k4"), |b| {
            b.iter_batched(
                || fresh(name, 4),
                |ctx| {
                    let monos = MultiIndex::all_up_to_degree(ctx.n(), 3);
                    for a in &monos {
                        for m in &monos {
                            let (pa, pm) = (ctx.ring().monomial(a, int(1)), ctx.ring().monomial(m, int(1)));
                            black_box(ctx.pbw_star(&pa, &pm).expect("star"));
                        }
                    }
                },
                BatchSize::PerIteration,
            )
        });
    }
    group.finish();
}

fn bench_gutt(c: &mut Criterion) {
    let mut group = c.benchmark_group("gutt_twistor");
    group.sample_size(10);
    for name in ["heisenberg", "sl2-borel", "sl2"] {
        group.bench_function(format!("{name}_build_k3"), |b| {
            b.iter_batched(
                || fresh(name, 3),
                |ctx| black_box(build_gutt_twistor(&ctx).expect("gutt")),
                BatchSize::PerIteration,
            )
        });
        group.bench_function(format!("{name}_check_k3"), |b| {
            b.iter_batched(
                || {
                    let ctx = fresh(name, 3);
                    let f = build_gutt_twistor(&ctx).expect("gutt");
                    (ctx, f)
                },
                |(ctx, f)| black_box(check_twistor(&ctx, &f).expect("check")),
                BatchSize::PerIteration,
            )
        });
    }
    group.finish();
}

fn bench_equivalence(c: &mut Criterion) {
    let mut group = c.benchmark_group("equivalence");
    group.sample_size(10);
    for name in ["axb", "oscillator"] {
        group.bench_function(format!("{name}_random4_k2"), |b| {
            b.iter_batched(
                || {
                    let ctx = fresh(name, 2);
                    let fs = random_invariant_twists(&ctx, 1, 4, 2, 2).expect("twists");
                    (ctx, fs)
                },
                |(ctx, fs)| {
                    for f in &fs {
                        black_box(check_equivalence(&ctx, f).expect("equivalence"));
                    }
                },
                BatchSize::PerIteration,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pbw_star, bench_gutt, bench_equivalence);
criterion_main!(benches);
