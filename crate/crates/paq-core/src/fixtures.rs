//! Named example states used by the test suites and shipped with the CLI.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cq::CQState;
use crate::error::{Error, Result};
use crate::operator::{CMat, DensityOperator, HermitianOperator};

/// Uniform bit with trivial side information (`d_E = 1`).
pub fn uniform_bit() -> CQState {
    CQState::classical(vec![0.5, 0.5]).unwrap()
}

/// Perfectly correlated classical bit: uniform `p`, Eve holds a copy.
pub fn correlated_bit() -> CQState {
    CQState::new(
        vec![0.5, 0.5],
        vec![
            HermitianOperator::from_diagonal(&[1.0, 0.0]),
            HermitianOperator::from_diagonal(&[0.0, 1.0]),
        ],
    )
    .unwrap()
}

/// Two uniform bits, trivial side information.
pub fn product_uniform_2bit() -> CQState {
    CQState::classical(vec![0.25; 4]).unwrap()
}

/// The biased classical source `p = (1/4, 3/4)` with trivial side
/// information; its conditional information variance is `(3/16)·(log 3)²`.
pub fn classical_quarter() -> CQState {
    CQState::classical(vec![0.25, 0.75]).unwrap()
}

/// A Ginibre-sampled density operator, deterministic per rng state.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
    let g = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let psd = &g * g.adjoint();
    let tr = psd.trace().re;
    DensityOperator::from_matrix(psd * Complex64::new(1.0 / tr, 0.0))
        .expect("normalized Ginibre sample is a density operator")
}

/// A random c-q state with Dirichlet-free prior (normalized uniforms) and
/// Ginibre side-information states, deterministic per seed.
pub fn random_cq(alphabet: usize, dim_e: usize, seed: u64) -> CQState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..alphabet).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let rhos: Vec<HermitianOperator> = (0..alphabet)
        .map(|_| random_density(dim_e, &mut rng).into_hermitian())
        .collect();
    CQState::new(p, rhos).expect("random ensemble is a valid c-q state")
}

/// The pinned random qubit-side-information fixture (`|X| = 2`, `d_E = 2`).
pub fn random_qubit_state() -> CQState {
    random_cq(2, 2, 0xC0FFEE)
}

/// Looks a fixture up by its CLI name.
pub fn by_name(name: &str) -> Result<CQState> {
    match name {
        "uniform-bit" => Ok(uniform_bit()),
        "correlated-bit" => Ok(correlated_bit()),
        "product-uniform-2bit" => Ok(product_uniform_2bit()),
        "classical-quarter" => Ok(classical_quarter()),
        "random-qubit" => Ok(random_qubit_state()),
        other => Err(Error::validation(format!(
            "unknown fixture '{other}' (expected uniform-bit, correlated-bit, \
             product-uniform-2bit, classical-quarter, or random-qubit)"
        ))),
    }
}

/// All fixture names, in presentation order.
pub const NAMES: [&str; 5] = [
    "uniform-bit",
    "correlated-bit",
    "product-uniform-2bit",
    "classical-quarter",
    "random-qubit",
];
