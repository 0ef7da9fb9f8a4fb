use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use morrey_core::{
    build_flat_family, build_infinite_witness, check_gp, estimate_morrey_envelope, morrey_norm_dyadic,
    n_norm, rearrange, spread_simple_function, DyadicCube, ExtReal, GapRule, PhiSpec, SimpleFunction,
};

fn phi_uv(d: usize, u: f64, v: f64) -> PhiSpec {
    PhiSpec::phi_uv(d, ExtReal::Finite(u), ExtReal::Finite(v)).unwrap()
}

/// `n` unit-height cubes on level `level` spread along the first axis.
fn row(d: usize, level: i32, n: i64) -> SimpleFunction {
    let parts = (0..n)
        .map(|k| {
            let mut idx = vec![0i64; d];
            idx[0] = 3 * k;
            (1.0 + (k % 7) as f64, DyadicCube::from_i64(level, &idx))
        })
        .collect();
    SimpleFunction::dyadic(d, parts).unwrap()
}

fn bench_norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("morrey_norm_dyadic");
    for d in [1usize, 2] {
        let phi = phi_uv(d, 4.0, 2.0);
        for n in [16i64, 256, 4096] {
            let f = row(d, 6, n);
            g.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &f, |b, f| {
                b.iter(|| morrey_norm_dyadic(black_box(f), &phi, 2.0).unwrap())
            });
        }
    }
    g.finish();

    let phi = PhiSpec::power(1, 0.5).unwrap();
    let mut g = c.benchmark_group("n_norm");
    for j in [16u32, 48] {
        let w = build_infinite_witness(0.5, 1.0, ExtReal::Finite(2.0), &phi, j, 8).unwrap();
        g.bench_with_input(BenchmarkId::new("witness", j), &w, |b, w| {
            b.iter(|| n_norm(black_box(w), &phi).unwrap())
        });
    }
    g.finish();
}

fn bench_constructions(c: &mut Criterion) {
    let phi = phi_uv(1, 2.0, 1.0);
    let levels = [(2.0, 0.125), (1.0, 0.5), (0.5, 1.0)];
    let norm: f64 = levels.iter().map(|(a, m)| a * m).sum();
    let levels: Vec<(f64, f64)> = levels.iter().map(|(a, m)| (a / norm, *m)).collect();
    c.bench_function("spread_simple_function", |b| {
        b.iter(|| spread_simple_function(black_box(&levels), &phi, 1.0).unwrap())
    });
    let phi = PhiSpec::power(1, 0.5).unwrap();
    c.bench_function("build_flat_family lattice j=10 x64", |b| {
        b.iter(|| build_flat_family(&phi, 1.0, black_box(10), 64, GapRule::Lattice).unwrap())
    });
    let f = row(2, 4, 4096);
    c.bench_function("rearrange 4096 cubes", |b| b.iter(|| rearrange(black_box(&f))));
}

fn bench_phi(c: &mut Criterion) {
    let phi = PhiSpec::new(
        1,
        vec![
            morrey_core::Segment::new(0.0, ExtReal::Finite(1.0), 1.0, 0.5, -0.25),
            morrey_core::Segment::new(1.0, ExtReal::Inf, 1.0, 1.0, 0.0),
        ],
    )
    .unwrap();
    c.bench_function("check_gp two-piece log weight", |b| b.iter(|| check_gp(black_box(&phi), 1.0).unwrap()));
    let grid: Vec<f64> = (0..=10).map(|k| (-(k as f64)).exp2()).collect();
    let phi = phi_uv(1, 2.0, 1.0);
    let mut g = c.benchmark_group("estimate_morrey_envelope");
    g.sample_size(10);
    g.bench_function("phi_(2,1) 11 points", |b| {
        b.iter(|| estimate_morrey_envelope(&phi, 1.0, black_box(&grid), 20).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_norms, bench_constructions, bench_phi);
criterion_main!(benches);
