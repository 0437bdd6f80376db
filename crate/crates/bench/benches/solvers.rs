use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use m2s_core::{
    find_t_randomized, gen_multicopy, gen_random, gen_random_regular, solve_auto, solve_brute, solve_coloring_baseline,
    solve_effective, IsingInstance, RandomSpec, SolveOptions, TParams,
};

fn methods(c: &mut Criterion, group: &str, cases: &[(String, IsingInstance)]) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    for (label, inst) in cases {
        g.bench_with_input(BenchmarkId::new("brute", label), inst, |b, i| {
            b.iter(|| solve_brute(black_box(i), 1).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("coloring", label), inst, |b, i| {
            b.iter(|| solve_coloring_baseline(black_box(i), 1).unwrap())
        });
        let cert = find_t_randomized(inst, &TParams::default(), 1, 8).unwrap();
        g.bench_with_input(BenchmarkId::new("effective", label), inst, |b, i| {
            b.iter(|| solve_effective(black_box(i), &cert, 1).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("auto", label), inst, |b, i| {
            b.iter(|| solve_auto(black_box(i), &SolveOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn multicopy(c: &mut Criterion) {
    let cases: Vec<_> = [3usize, 4, 5]
        .iter()
        .map(|&k| (format!("N{}", 4 * k), gen_multicopy(k, 4).unwrap()))
        .collect();
    methods(c, "multicopy", &cases);
}

fn random(c: &mut Criterion) {
    let mut cases: Vec<_> = [14usize, 18]
        .iter()
        .map(|&n| {
            let spec = RandomSpec {
                n,
                density: 0.3,
                wmin: -5,
                wmax: 5,
                seed: 7,
            };
            (format!("N{n}-p0.3"), gen_random(&spec).unwrap())
        })
        .collect();
    cases.push(("N20-3reg".into(), gen_random_regular(20, 3, -5, 5, 7).unwrap()));
    methods(c, "random", &cases);
}

criterion_group!(benches, multicopy, random);
criterion_main!(benches);
