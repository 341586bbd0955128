//! Property tests for the module-level invariants: spectral calculus,
//! hashing-channel structure, divergence ordering and limits, envelope
//! consistency, and simulator invariances.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use paq_core::exponents::ExponentKind;
use paq_core::fixtures;
use paq_core::hashing::universality_check;
use paq_core::operator::CMat;
use paq_core::renyi::MinimizeOptions;
use paq_core::{
    apply_hash, conditional_entropy, divergence, enumerate_family, exact_pa_distance, iid_extend,
    marginal_e, mat_power, pa_achievability_exponent, pa_converse_exponent, relative_entropy,
    spectral, star_conditional, tensor, trace_distance, AffineHash, CQState, DensityOperator,
    DivergenceKind, EntropyKind, GFContext, HermitianOperator,
};

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let m = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HermitianOperator::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

fn random_psd(dim: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let g = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    HermitianOperator::new(&g * g.adjoint()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spectral_reconstruction_up_to_dim_16(dim in 2usize..=16, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(dim, &mut rng);
        let s = spectral(&a);
        let rec = s.map_eigenvalues(|l| l);
        let err = (rec.matrix() - a.matrix()).norm();
        prop_assert!(err <= 1e-9 * a.matrix().norm().max(1e-300));
        // eigenvalues descending, eigenvectors orthonormal
        for w in s.eigenvalues.as_slice().windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
        prop_assert!((gram - CMat::identity(dim, dim)).norm() < 1e-9);
    }

    #[test]
    fn mat_power_roundtrip_on_support(dim in 2usize..=6, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_psd(dim, &mut rng);
        for p in [0.5, 2.0, 3.0] {
            let round = mat_power(&mat_power(&a, p).unwrap(), 1.0 / p).unwrap();
            let err = (round.matrix() - a.matrix()).norm();
            prop_assert!(err < 1e-8 * a.matrix().norm().max(1.0), "p={p}: {err}");
        }
    }

    #[test]
    fn hash_channel_preserves_mass(seed in 0u64..1000, u in 1u32..=3, a_idx in 0u64..64, b_idx in 0u64..64) {
        let ctx = GFContext::new(u).unwrap();
        let s = fixtures::random_cq(1 << u, 2, seed);
        let h = AffineHash::new(ctx, 1, a_idx % ctx.order(), b_idx % ctx.order()).unwrap();
        let out = apply_hash(&s, &h).unwrap();
        let total: f64 = out.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        // hashing never changes the E-marginal
        let before = marginal_e(&s);
        let after = marginal_e(&out);
        prop_assert!(trace_distance(before.as_hermitian(), after.as_hermitian()).unwrap() < 1e-12);
    }
}

#[test]
fn trace_distance_is_a_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let dim = rng.gen_range(2..=4usize);
        let a = fixtures::random_density(dim, &mut rng);
        let b = fixtures::random_density(dim, &mut rng);
        let c = fixtures::random_density(dim, &mut rng);
        let dab = trace_distance(a.as_hermitian(), b.as_hermitian()).unwrap();
        let dbc = trace_distance(b.as_hermitian(), c.as_hermitian()).unwrap();
        let dac = trace_distance(a.as_hermitian(), c.as_hermitian()).unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&dab));
        assert!(dac <= dab + dbc + 1e-10, "triangle violated: {dac} > {dab}+{dbc}");
        let dba = trace_distance(b.as_hermitian(), a.as_hermitian()).unwrap();
        assert!((dab - dba).abs() < 1e-12);
    }
}

#[test]
fn iid_extension_doubles_down_entropy() {
    for seed in 0..10u64 {
        let s = fixtures::random_cq(2, 2, seed);
        let s2 = iid_extend(&s, 2).unwrap();
        let h1 = conditional_entropy(EntropyKind::Down, &s, 0.7).unwrap();
        let h2 = conditional_entropy(EntropyKind::Down, &s2, 0.7).unwrap();
        assert!((h2 - 2.0 * h1).abs() < 1e-9, "seed {seed}");
    }
}

#[test]
fn petz_dominates_sandwiched() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..100 {
        let rho = fixtures::random_density(2, &mut rng);
        let sigma = fixtures::random_density(2, &mut rng);
        for alpha in [0.6, 0.8, 1.2, 1.5, 2.0] {
            let petz = divergence(DivergenceKind::Petz, &rho, sigma.as_hermitian(), alpha).unwrap();
            let sand =
                divergence(DivergenceKind::Sandwiched, &rho, sigma.as_hermitian(), alpha).unwrap();
            assert!(petz >= sand - 1e-9, "trial {trial} α={alpha}: {petz} < {sand}");
        }
    }
    // hence H^↓ ≤ H^↓* on c-q states (the step used under the EA bound)
    for seed in 0..20u64 {
        let s = fixtures::random_cq(2, 2, seed);
        for alpha in [0.7, 1.4, 2.0] {
            let down = conditional_entropy(EntropyKind::Down, &s, alpha).unwrap();
            let down_star = conditional_entropy(EntropyKind::DownStar, &s, alpha).unwrap();
            assert!(down <= down_star + 1e-9, "seed {seed} α={alpha}");
        }
    }
}

#[test]
fn classical_reduction_matches_scalar_renyi() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let dim = rng.gen_range(2..=4usize);
        let p: Vec<f64> = {
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.0)).collect();
            let t: f64 = raw.iter().sum();
            raw.iter().map(|r| r / t).collect()
        };
        let q: Vec<f64> = {
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.0)).collect();
            let t: f64 = raw.iter().sum();
            raw.iter().map(|r| r / t).collect()
        };
        let rho = DensityOperator::from_probabilities(&p).unwrap();
        let sigma = HermitianOperator::from_diagonal(&q);
        for alpha in [0.6, 1.5, 2.0] {
            let scalar = (p
                .iter()
                .zip(&q)
                .map(|(&pi, &qi)| pi.powf(alpha) * qi.powf(1.0 - alpha))
                .sum::<f64>())
            .ln()
                / (alpha - 1.0);
            for kind in [DivergenceKind::Petz, DivergenceKind::Sandwiched] {
                let d = divergence(kind, &rho, &sigma, alpha).unwrap();
                assert!((d - scalar).abs() < 1e-10, "{kind:?} α={alpha}: {d} vs {scalar}");
            }
        }
    }
}

#[test]
fn divergence_limits_approach_relative_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..20 {
        let rho = fixtures::random_density(2, &mut rng);
        let sigma = fixtures::random_density(2, &mut rng);
        let d = relative_entropy(&rho, sigma.as_hermitian()).unwrap();
        for kind in [DivergenceKind::Petz, DivergenceKind::Sandwiched] {
            for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
                let v = divergence(kind, &rho, sigma.as_hermitian(), alpha).unwrap();
                assert!((v - d).abs() <= 1e-3, "{kind:?} α={alpha}: {v} vs {d}");
            }
        }
    }
}

#[test]
fn envelope_dominates_pointwise_objective() {
    for seed in 0..8u64 {
        let s = fixtures::random_cq(2, 2, seed);
        let rate = 0.4;

        let conv = pa_converse_exponent(&s, rate).unwrap();
        for alpha in [0.55, 0.7, 0.9] {
            let h = conditional_entropy(EntropyKind::Down, &s, 2.0 - 1.0 / alpha).unwrap();
            let obj = (1.0 - alpha) / alpha * (rate - h);
            assert!(conv.raw.exponent >= obj - 1e-9, "seed {seed} α={alpha}");
        }

        let ach = pa_achievability_exponent(&s, rate).unwrap();
        for alpha in [1.2, 1.5, 2.0] {
            let (h, _) = star_conditional(&s, alpha, &MinimizeOptions::default()).unwrap();
            let obj = (alpha - 1.0) / alpha * (h - rate);
            assert!(ach.raw.exponent >= obj - 1e-9, "seed {seed} α={alpha}");
        }
    }
}

#[test]
fn bound_scaling_is_exactly_exponential_in_n() {
    let s = fixtures::correlated_bit();
    let report = pa_converse_exponent(&s, std::f64::consts::LN_2).unwrap();
    assert_eq!(report.kind, ExponentKind::PaConverse);
    assert!(report.exponent > 0.0);
    for n in [1u64, 5, 10, 50] {
        // log(4/(1−bound)) is linear in n with slope = exponent
        let raw = report.raw_bound_at(n);
        let lhs = (4.0 / (1.0 - raw)).ln();
        assert!((lhs - n as f64 * report.raw.exponent).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn exact_pa_monotone_in_extracted_bits() {
    // more extracted bits, larger distance
    for seed in 0..12u64 {
        let s = fixtures::random_cq(4, 2, seed);
        let ctx = GFContext::new(2).unwrap();
        let v1 = exact_pa_distance(&s, ctx, 1, false).unwrap().value;
        let v2 = exact_pa_distance(&s, ctx, 2, false).unwrap().value;
        assert!(
            v2 >= v1 - 1e-9,
            "monotonicity finding: seed {seed}: ε_PA(v=2) = {v2} < ε_PA(v=1) = {v1}"
        );
    }
}

#[test]
fn per_hash_distance_depends_on_a_only_when_bijective() {
    // for v = u the offset b merely relabels outputs; distances agree per a
    for u in 1..=3u32 {
        let ctx = GFContext::new(u).unwrap();
        let s = fixtures::random_cq(1 << u, 2, 7 + u as u64);
        let r = exact_pa_distance(&s, ctx, u, true).unwrap();
        let breakdown = r.per_hash.unwrap();
        for a in 0..ctx.order() {
            let ds: Vec<f64> = breakdown
                .iter()
                .filter(|(aa, _, _)| *aa == a)
                .map(|&(_, _, d)| d)
                .collect();
            for w in ds.windows(2) {
                assert!((w[0] - w[1]).abs() < 1e-12, "u={u} a={a}");
            }
        }
    }
}

#[test]
fn strong_universality_exact_up_to_u6() {
    for u in 1..=6u32 {
        let ctx = GFContext::new(u).unwrap();
        for v in 1..=u {
            let table = universality_check(ctx, v).unwrap();
            assert!(table.is_uniform(), "u={u} v={v}");
            assert_eq!(table.expected, 1u64 << (2 * (u - v)));
        }
    }
}

#[test]
fn balanced_fraction_is_exact() {
    for u in 1..=4u32 {
        let ctx = GFContext::new(u).unwrap();
        let family = enumerate_family(ctx, 1).unwrap();
        let balanced = family.iter().filter(|h| h.is_balanced()).count() as u64;
        assert_eq!(balanced, family.len() - (1u64 << u));
    }
}

#[test]
fn flat_state_hashes_to_randomizing_target() {
    // balanced hash + uniform p + constant ρ_E^x lands exactly on the target
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let tau = fixtures::random_density(2, &mut rng);
    let s = CQState::new(vec![0.25; 4], vec![tau.as_hermitian().clone(); 4]).unwrap();
    let ctx = GFContext::new(2).unwrap();
    for a in 1..4u64 {
        for b in 0..4u64 {
            let h = AffineHash::new(ctx, 1, a, b).unwrap();
            let hashed = apply_hash(&s, &h).unwrap();
            let target = paq_core::randomized_target(&s, 2).unwrap();
            let dist = hashed.to_blocks().trace_distance(&target).unwrap();
            assert!(dist < 1e-10, "a={a} b={b}: {dist}");
        }
    }
}

#[test]
fn extension_marginal_is_tensor_power() {
    for seed in 0..6u64 {
        let s = fixtures::random_cq(2, 2, seed);
        let ext = iid_extend(&s, 2).unwrap();
        let m = marginal_e(&s);
        let m2 = marginal_e(&ext);
        let expect = tensor(m.as_hermitian(), m.as_hermitian());
        assert!(trace_distance(m2.as_hermitian(), &expect).unwrap() < 1e-10, "seed {seed}");
    }
}

#[test]
fn star_entropy_additive_under_extension() {
    // exercises the minimizer on dim-4 side information
    for seed in [3u64, 9] {
        let s = fixtures::random_cq(2, 2, seed);
        let s2 = iid_extend(&s, 2).unwrap();
        for alpha in [1.5, 2.0] {
            let h1 = conditional_entropy(EntropyKind::Star, &s, alpha).unwrap();
            let h2 = conditional_entropy(EntropyKind::Star, &s2, alpha).unwrap();
            assert!(
                (h2 - 2.0 * h1).abs() < 1e-5,
                "seed {seed} α={alpha}: {h2} vs 2×{h1}"
            );
        }
    }
}
