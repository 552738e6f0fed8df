use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use cbq_core::gallery::random_semi_affine;
use cbq_core::{
    classify_unit, lemma4_chain, phi, random_complex_orthogonal, sample, theorem1_candidates,
    verify_chain, ClassifyOptions, MapSpec,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_phi(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [2usize, 8] {
        let x = sample::point(&mut rng, n, 2.0);
        let y = sample::point(&mut rng, n, 2.0);
        c.bench_with_input(BenchmarkId::new("phi", n), &n, |b, _| {
            b.iter(|| phi(black_box(&x), black_box(&y)).unwrap())
        });
    }
}

fn bench_random_orthogonal(c: &mut Criterion) {
    for n in [2usize, 4, 8] {
        c.bench_with_input(
            BenchmarkId::new("random_complex_orthogonal", n),
            &n,
            |b, &n| {
                let mut seed = 0u64;
                b.iter(|| {
                    seed = seed.wrapping_add(1);
                    random_complex_orthogonal(black_box(n), seed, 1.0)
                })
            },
        );
    }
}

fn bench_forcing_solve(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [2usize, 4] {
        let x = sample::nonreal_point(&mut rng, n, 2.0, 0.1);
        c.bench_with_input(BenchmarkId::new("theorem1_candidates", n), &n, |b, _| {
            b.iter(|| theorem1_candidates(black_box(&x)).unwrap())
        });
    }
}

fn bench_chain_roundtrip(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = sample::nonreal_point(&mut rng, 4, 2.0, 0.1);
    c.bench_function("lemma4_chain_build_and_verify", |b| {
        b.iter(|| {
            let chain = lemma4_chain(black_box(&x)).unwrap();
            verify_chain(&chain, 1e-9).pass
        })
    });
}

fn bench_classify(c: &mut Criterion) {
    let spec = MapSpec::SemiAffine(random_semi_affine(3, 42));
    let opts = ClassifyOptions {
        validation_count: 64,
        ..ClassifyOptions::default()
    };
    c.bench_function("classify_unit_n3_v64", |b| {
        b.iter(|| classify_unit(black_box(&spec), 3, &opts).unwrap())
    });
}

criterion_group!(
    benches,
    bench_phi,
    bench_random_orthogonal,
    bench_forcing_solve,
    bench_chain_roundtrip,
    bench_classify
);
criterion_main!(benches);
