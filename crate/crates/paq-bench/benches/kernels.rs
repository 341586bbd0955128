//! Criterion benchmarks for the numeric kernels: eigendecomposition, field
//! multiplication, exact family enumeration, the simplex minimizer, and one
//! full exponent envelope.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use paq_core::fixtures;
use paq_core::renyi::{minimize_sigma, MinimizeOptions, SigmaObjective};
use paq_core::{
    exact_pa_distance, pa_converse_exponent, spectral, CQState, GFContext, HermitianOperator,
};

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let m = paq_core::CMat::from_fn(dim, dim, |_, _| {
        num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HermitianOperator::new((&m + m.adjoint()) * num_complex::Complex64::new(0.5, 0.0)).unwrap()
}

fn bench_spectral(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dim in [4usize, 16] {
        let a = random_hermitian(dim, &mut rng);
        c.bench_function(&format!("spectral_dim{dim}"), |b| {
            b.iter(|| spectral(std::hint::black_box(&a)))
        });
    }
}

fn bench_gf_mul(c: &mut Criterion) {
    let ctx = GFContext::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pairs: Vec<(u64, u64)> = (0..1024)
        .map(|_| (rng.gen_range(0..256), rng.gen_range(0..256)))
        .collect();
    c.bench_function("gf256_mul_1024", |b| {
        b.iter(|| {
            let mut acc = 0u64;
            for &(x, y) in &pairs {
                acc ^= ctx.mul(x, y).unwrap();
            }
            acc
        })
    });
}

fn bench_exact_pa(c: &mut Criterion) {
    let s = fixtures::random_cq(4, 2, 7);
    let ctx = GFContext::new(2).unwrap();
    c.bench_function("exact_pa_u2_qubit", |b| {
        b.iter(|| exact_pa_distance(std::hint::black_box(&s), ctx, 1, false).unwrap())
    });
    let s8: CQState = fixtures::random_cq(8, 2, 8);
    let ctx3 = GFContext::new(3).unwrap();
    c.bench_function("exact_pa_u3_qubit", |b| {
        b.iter(|| exact_pa_distance(std::hint::black_box(&s8), ctx3, 1, false).unwrap())
    });
}

fn bench_minimizer(c: &mut Criterion) {
    let s = fixtures::random_cq(2, 2, 11);
    let weights: Vec<f64> = s.probabilities().to_vec();
    let states: Vec<&HermitianOperator> = (0..2).map(|x| s.rho(x)).collect();
    let obj = SigmaObjective::new(&weights, &states, 1.5).unwrap();
    c.bench_function("minimize_sigma_qubit_a1_5", |b| {
        b.iter_batched(
            MinimizeOptions::default,
            |opts| minimize_sigma(std::hint::black_box(&obj), &opts).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_envelope(c: &mut Criterion) {
    let s = fixtures::random_cq(2, 2, 13);
    c.bench_function("pa_converse_envelope", |b| {
        b.iter(|| pa_converse_exponent(std::hint::black_box(&s), 0.9).unwrap())
    });
}

criterion_group!(
    benches,
    bench_spectral,
    bench_gf_mul,
    bench_exact_pa,
    bench_minimizer,
    bench_envelope
);
criterion_main!(benches);
